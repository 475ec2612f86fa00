//! Nonlinear disturbance observer.
//!
//! b_hat = z + K0 M nu
//! z_dot = -K0 z - K0 [tau - C(nu) nu - D(nu) nu + K0 M nu]
//!
//! For a diagonal positive K0 the estimation error obeys
//! `b_e_dot = b_dot - K0 b_e`, so a constant disturbance is recovered
//! exponentially at rate K0 per channel.

use crate::vessel::Vessel;
use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverState {
    pub z: Vec3,
    /// Diagonal of K0.
    pub k0: Vec3,
}

impl ObserverState {
    pub fn new(k0: Vec3) -> Result<Self> {
        if k0.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "observer gain K0 must be strictly positive, got {k0:?}"
            )));
        }
        Ok(Self { z: Vec3::zeros(), k0 })
    }

    pub fn with_state(mut self, z: Vec3) -> Self {
        self.z = z;
        self
    }
}

/// Time derivative of the observer's internal state given the measured
/// velocity and the actuation actually applied to the hull.
pub fn observer_deriv(obs: &ObserverState, vessel: &Vessel, nu: &Vec3, tau: &Vec3) -> Vec3 {
    observer_deriv_raw(&obs.z, &obs.k0, vessel, nu, tau)
}

pub(crate) fn observer_deriv_raw(z: &Vec3, k0: &Vec3, vessel: &Vessel, nu: &Vec3, tau: &Vec3) -> Vec3 {
    let k0m_nu = k0.component_mul(&(vessel.mass() * nu));
    let inner = tau - vessel.hydro_forces(nu) + k0m_nu;
    -k0.component_mul(z) - k0.component_mul(&inner)
}

/// b_hat = z + K0 M nu.
pub fn estimate(obs: &ObserverState, vessel: &Vessel, nu: &Vec3) -> Vec3 {
    estimate_raw(&obs.z, &obs.k0, vessel, nu)
}

pub(crate) fn estimate_raw(z: &Vec3, k0: &Vec3, vessel: &Vessel, nu: &Vec3) -> Vec3 {
    z + k0.component_mul(&(vessel.mass() * nu))
}
