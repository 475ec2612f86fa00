//! Backstepping tracking laws.
//!
//! Asymmetric magnitude stack:
//!
//! z1 = eta - eta_d
//! a1 = J^T (eta_d_dot - K1 z1),                      z2 = nu - a1
//! a2 = C nu + D nu + M a1_dot - K2 z2 - J^T z1 - b_hat,  z3 = tau - a2
//! tau_c = F^-1 (rho tau + a2_dot) - K3 z3 - z2
//!
//! with F the diagonal of `Q (I - G_M) + (I - Q)(I - G_m)`. The magnitude and
//! rate stack replaces the last line with
//!
//! a3 = (I - G1)^-1 (rho1 (tau_dM / tau_M) zeta + a2_dot - K3 z3 - z2),  z4 = tau_c - a3
//! tau_d = (I - G2)^-1 (rho2 tau_c + a3_dot - K4 z4 - (I - G1) z3)
//!
//! The `a*_dot` terms are first-order backward differences at the control
//! rate. A difference is only started once the one feeding it is valid, so
//! the first samples never see a jump from zero.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::saturation::{asym_gain_factor, rate_gain_factors, ActuatorState, AsymSatConfig, RateSatConfig};
use crate::trajectory::ReferenceSample;
use crate::vessel::{rotation_matrix, Vessel};
use crate::{Error, Result, Vec3};

/// Smallest magnitude accepted for a diagonal gain factor before inversion.
pub const EPS_INV: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ProposedAsym,
    ProposedMagrate,
    Adhoc,
    Unbounded,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::ProposedAsym, Method::ProposedMagrate, Method::Adhoc, Method::Unbounded];

    pub fn is_proposed(self) -> bool {
        matches!(self, Method::ProposedAsym | Method::ProposedMagrate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ProposedAsym => "proposed-asym",
            Method::ProposedMagrate => "proposed-magrate",
            Method::Adhoc => "adhoc",
            Method::Unbounded => "unbounded",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method {s:?}")))
    }
}

/// Diagonals of the controller gain matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainSet {
    #[serde(rename = "K1")]
    pub k1: Vec3,
    #[serde(rename = "K2")]
    pub k2: Vec3,
    #[serde(rename = "K3")]
    pub k3: Vec3,
    /// Only used by the magnitude and rate stack.
    #[serde(rename = "K4")]
    pub k4: Vec3,
}

impl GainSet {
    /// Gains tuned for the asymmetric magnitude model.
    pub fn asym_table() -> Self {
        Self {
            k1: Vec3::new(4.0, 3.0, 0.5),
            k2: Vec3::new(2.0, 3.0, 0.5),
            k3: Vec3::new(2.0, 3.0, 0.5),
            k4: Vec3::new(0.2, 0.5, 0.1),
        }
    }

    /// Gains tuned for the magnitude and rate model.
    pub fn magrate_table() -> Self {
        Self {
            k1: Vec3::new(0.02, 0.02, 0.05),
            k2: Vec3::new(2.0, 3.0, 5.0),
            k3: Vec3::new(2.0, 1.0, 5.0),
            k4: Vec3::new(0.2, 0.5, 0.1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [("K1", &self.k1), ("K2", &self.k2), ("K3", &self.k3), ("K4", &self.k4)] {
            if k.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
                return Err(Error::InvalidConfig(format!("{name} must be positive, got {k:?}")));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            k1: self.k1 * s,
            k2: self.k2 * s,
            k3: self.k3 * s,
            k4: self.k4 * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControllerScratch {
    pub z1: Vec3,
    pub z2: Vec3,
    pub z3: Vec3,
    pub z4: Vec3,
    pub alpha1: Vec3,
    pub alpha2: Vec3,
    pub alpha3: Vec3,
    pub alpha1_dot: Vec3,
    pub alpha2_dot: Vec3,
    pub alpha3_dot: Vec3,
}

/// Wraps an angle to (-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

pub fn tracking_error_z1(eta: &Vec3, eta_d: &Vec3) -> Vec3 {
    let mut z = eta - eta_d;
    z[2] = wrap_angle(z[2]);
    z
}

pub fn alpha1(eta: &Vec3, z1: &Vec3, eta_d_dot: &Vec3, k1: &Vec3) -> Vec3 {
    rotation_matrix(eta[2]).transpose() * (eta_d_dot - k1.component_mul(z1))
}

#[allow(clippy::too_many_arguments)]
pub fn alpha2(
    vessel: &Vessel,
    nu: &Vec3,
    z1: &Vec3,
    z2: &Vec3,
    alpha1_dot: &Vec3,
    b_hat: &Vec3,
    eta: &Vec3,
    k2: &Vec3,
) -> Vec3 {
    vessel.hydro_forces(nu) + vessel.mass() * alpha1_dot
        - k2.component_mul(z2)
        - rotation_matrix(eta[2]).transpose() * z1
        - b_hat
}

/// Elementwise reciprocal with magnitudes clamped to at least [`EPS_INV`].
/// Returns the reciprocal and the number of clamped entries.
pub fn guarded_reciprocal(f: &Vec3) -> (Vec3, usize) {
    let mut clamped = 0;
    let inv = f.map(|x| {
        if x.abs() < EPS_INV || !x.is_finite() {
            clamped += 1;
            1.0 / if x < 0.0 { -EPS_INV } else { EPS_INV }
        } else {
            1.0 / x
        }
    });
    (inv, clamped)
}

fn guarded_reciprocal_logged(f: &Vec3, what: &str) -> (Vec3, usize) {
    let (inv, n) = guarded_reciprocal(f);
    if n > 0 {
        warn!("{what}: gain factor {f:?} near singular, clamped to {EPS_INV:e}; actuator at its effective bound");
    }
    (inv, n)
}

pub fn control_tau_c(scratch: &ControllerScratch, tau: &Vec3, cfg: &AsymSatConfig, k3: &Vec3) -> Vec3 {
    control_tau_c_counted(scratch, tau, cfg, k3).0
}

fn control_tau_c_counted(scratch: &ControllerScratch, tau: &Vec3, cfg: &AsymSatConfig, k3: &Vec3) -> (Vec3, usize) {
    let (inv, n) = guarded_reciprocal_logged(&asym_gain_factor(cfg, tau), "tau_c");
    let ff = cfg.rho.component_mul(tau) + scratch.alpha2_dot;
    (inv.component_mul(&ff) - k3.component_mul(&scratch.z3) - scratch.z2, n)
}

pub fn alpha3(scratch: &ControllerScratch, state: &ActuatorState, cfg: &RateSatConfig, k3: &Vec3) -> Vec3 {
    alpha3_counted(scratch, state, cfg, k3).0
}

fn alpha3_counted(scratch: &ControllerScratch, state: &ActuatorState, cfg: &RateSatConfig, k3: &Vec3) -> (Vec3, usize) {
    let (f1, _) = rate_gain_factors(cfg, state);
    let (inv, n) = guarded_reciprocal_logged(&f1, "alpha3");
    let inner = cfg.zeta_decay().component_mul(&state.zeta) + scratch.alpha2_dot
        - k3.component_mul(&scratch.z3)
        - scratch.z2;
    (inv.component_mul(&inner), n)
}

pub fn control_tau_d(scratch: &ControllerScratch, state: &ActuatorState, cfg: &RateSatConfig, k4: &Vec3) -> Vec3 {
    control_tau_d_counted(scratch, state, cfg, k4).0
}

fn control_tau_d_counted(
    scratch: &ControllerScratch,
    state: &ActuatorState,
    cfg: &RateSatConfig,
    k4: &Vec3,
) -> (Vec3, usize) {
    let (f1, f2) = rate_gain_factors(cfg, state);
    let (inv, n) = guarded_reciprocal_logged(&f2, "tau_d");
    let inner = cfg.rho2.component_mul(&state.tau_c) + scratch.alpha3_dot
        - k4.component_mul(&scratch.z4)
        - f1.component_mul(&scratch.z3);
    (inv.component_mul(&inner), n)
}

pub fn baseline_unbounded(scratch: &ControllerScratch) -> Vec3 {
    scratch.alpha2
}

/// Clamps the two-stage law to `[-lower, upper]` per axis.
pub fn baseline_adhoc(scratch: &ControllerScratch, upper: &Vec3, lower: &Vec3) -> Vec3 {
    Vec3::from_fn(|i, _| scratch.alpha2[i].clamp(-lower[i], upper[i]))
}

/// `(current - previous) / dt`, or zero when there is no previous sample.
pub fn alpha_derivative(previous: Option<&Vec3>, current: &Vec3, dt: f64) -> Vec3 {
    previous.map_or_else(Vec3::zeros, |p| (current - p) / dt)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackwardDifference {
    dt: f64,
    previous: Option<Vec3>,
}

impl BackwardDifference {
    pub fn new(dt: f64) -> Self {
        Self { dt, previous: None }
    }

    /// Stores `x` and returns the difference quotient, `None` on the first
    /// sample.
    pub fn update(&mut self, x: Vec3) -> Option<Vec3> {
        let d = self.previous.map(|p| (x - p) / self.dt);
        self.previous = Some(x);
        d
    }

    pub fn reset(&mut self) {
        self.previous = None;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ActuatorConfig {
    Asym(AsymSatConfig),
    Magrate(RateSatConfig),
}

impl ActuatorConfig {
    pub fn validate(&self) -> Result<()> {
        match self {
            ActuatorConfig::Asym(c) => c.validate(),
            ActuatorConfig::Magrate(c) => c.validate(),
        }
    }

    /// Upper bound and lower-bound magnitude per axis.
    pub fn magnitude_bounds(&self) -> (Vec3, Vec3) {
        match self {
            ActuatorConfig::Asym(c) => (c.tau_max, c.tau_min),
            ActuatorConfig::Magrate(c) => (c.tau_max, c.tau_max),
        }
    }

    pub fn rate_bounds(&self) -> Option<Vec3> {
        match self {
            ActuatorConfig::Asym(_) => None,
            ActuatorConfig::Magrate(c) => Some(c.tau_rate_max),
        }
    }

    /// Assumed bound on the norm of the saturation-model drive.
    pub fn drive_bound(&self) -> f64 {
        match self {
            ActuatorConfig::Asym(c) => c.tau_c_max,
            ActuatorConfig::Magrate(c) => c.tau_d_max,
        }
    }
}

/// Measured signals the controller acts on at one sampling instant.
#[derive(Debug, Clone, Copy)]
pub struct ControlInput<'a> {
    pub eta: &'a Vec3,
    pub nu: &'a Vec3,
    pub b_hat: &'a Vec3,
    pub reference: &'a ReferenceSample,
    pub actuator: &'a ActuatorState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub scratch: ControllerScratch,
    /// Drive handed to the actuator model (`tau_c` or `tau_d`), or the force
    /// itself for the baselines.
    pub command: Vec3,
    /// Force acting on the hull at this instant.
    pub tau: Vec3,
}

/// Stateful controller for one run.
#[derive(Debug, Clone)]
pub struct Controller {
    method: Method,
    gains: GainSet,
    actuator: ActuatorConfig,
    d1: BackwardDifference,
    d2: BackwardDifference,
    d3: BackwardDifference,
    clamp_events: usize,
}

impl Controller {
    pub fn new(method: Method, gains: GainSet, actuator: ActuatorConfig, dt: f64) -> Result<Self> {
        gains.validate()?;
        actuator.validate()?;
        match (method, &actuator) {
            (Method::ProposedAsym, ActuatorConfig::Magrate(_)) | (Method::ProposedMagrate, ActuatorConfig::Asym(_)) => {
                return Err(Error::InvalidConfig(format!(
                    "method {method} does not match the configured actuator model"
                )));
            }
            _ => {}
        }
        if !(dt > 0.0) {
            return Err(Error::InvalidConfig(format!("control period must be positive, got {dt}")));
        }
        Ok(Self {
            method,
            gains,
            actuator,
            d1: BackwardDifference::new(dt),
            d2: BackwardDifference::new(dt),
            d3: BackwardDifference::new(dt),
            clamp_events: 0,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn gains(&self) -> &GainSet {
        &self.gains
    }

    pub fn actuator(&self) -> &ActuatorConfig {
        &self.actuator
    }

    /// Number of gain-factor entries clamped so far.
    pub fn clamp_events(&self) -> usize {
        self.clamp_events
    }

    pub fn step(&mut self, vessel: &Vessel, input: ControlInput<'_>) -> ControlOutput {
        let g = self.gains;
        let r = input.reference;
        let mut s = ControllerScratch {
            z1: tracking_error_z1(input.eta, &r.eta_d),
            ..Default::default()
        };
        s.alpha1 = alpha1(input.eta, &s.z1, &r.eta_d_dot, &g.k1);
        let a1d = self.d1.update(s.alpha1);
        s.alpha1_dot = a1d.unwrap_or_else(Vec3::zeros);
        s.z2 = input.nu - s.alpha1;
        s.alpha2 = alpha2(vessel, input.nu, &s.z1, &s.z2, &s.alpha1_dot, input.b_hat, input.eta, &g.k2);
        let a2d = if a1d.is_some() { self.d2.update(s.alpha2) } else { None };
        s.alpha2_dot = a2d.unwrap_or_else(Vec3::zeros);

        let (tau, command) = match (self.method, &self.actuator) {
            (Method::ProposedAsym, ActuatorConfig::Asym(cfg)) => {
                let tau = input.actuator.zeta;
                s.z3 = tau - s.alpha2;
                let (tc, n) = control_tau_c_counted(&s, &tau, cfg, &g.k3);
                self.clamp_events += n;
                (tau, tc)
            }
            (Method::ProposedMagrate, ActuatorConfig::Magrate(cfg)) => {
                let tau = input.actuator.zeta;
                s.z3 = tau - s.alpha2;
                let (a3, n3) = alpha3_counted(&s, input.actuator, cfg, &g.k3);
                s.alpha3 = a3;
                let a3d = if a2d.is_some() { self.d3.update(a3) } else { None };
                s.alpha3_dot = a3d.unwrap_or_else(Vec3::zeros);
                s.z4 = input.actuator.tau_c - a3;
                let (td, n4) = control_tau_d_counted(&s, input.actuator, cfg, &g.k4);
                self.clamp_events += n3 + n4;
                (tau, td)
            }
            (Method::Adhoc, act) => {
                let (up, lo) = act.magnitude_bounds();
                let tau = baseline_adhoc(&s, &up, &lo);
                (tau, tau)
            }
            (Method::Unbounded, _) => {
                let tau = baseline_unbounded(&s);
                (tau, tau)
            }
            _ => unreachable!("method and actuator model checked in Controller::new"),
        };
        if !self.method.is_proposed() {
            s.z3 = tau - s.alpha2;
        }
        ControlOutput { scratch: s, command, tau }
    }
}

/// Lyapunov function of the stack behind `method`: `V2` for the baselines,
/// `V3` for the asymmetric stack and `V4` for the magnitude and rate stack.
pub fn lyapunov_value(method: Method, vessel: &Vessel, s: &ControllerScratch, b_err: &Vec3) -> f64 {
    let v2 = 0.5 * s.z1.norm_squared() + 0.5 * s.z2.dot(&(vessel.mass() * s.z2)) + 0.5 * b_err.norm_squared();
    match method {
        Method::Adhoc | Method::Unbounded => v2,
        Method::ProposedAsym => v2 + 0.5 * s.z3.norm_squared(),
        Method::ProposedMagrate => v2 + 0.5 * s.z3.norm_squared() + 0.5 * s.z4.norm_squared(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{ellipse_ref, figure8_ref};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn v() -> Vessel {
        Vessel::cybership2()
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), m.as_str());
        }
        assert!("proposed".parse::<Method>().is_err());
    }

    #[test]
    fn wrap_examples() {
        assert_abs_diff_eq!(wrap_angle(PI), PI);
        assert_abs_diff_eq!(wrap_angle(-PI), PI);
        assert_abs_diff_eq!(wrap_angle(0.3), 0.3);
        assert_abs_diff_eq!(wrap_angle(7.0), 7.0 - TAU, epsilon = 1e-15);
    }

    #[test]
    fn z1_examples() {
        let e = Vec3::new(1.0, 2.0, 0.4);
        assert_eq!(tracking_error_z1(&e, &e), Vec3::zeros());
        assert_eq!(tracking_error_z1(&Vec3::new(-1.0, 0.0, 0.01), &Vec3::zeros()), Vec3::new(-1.0, 0.0, 0.01));
        let z = tracking_error_z1(&Vec3::new(0.0, 0.0, 3.2), &Vec3::new(0.0, 0.0, -3.0));
        assert_abs_diff_eq!(z[2], 6.2 - TAU, epsilon = 1e-12);
        assert!(z[2].abs() < 0.084);
    }

    #[test]
    fn alpha1_examples() {
        let ed = Vec3::new(0.3, -0.1, 0.02);
        let k1 = Vec3::new(4.0, 3.0, 0.5);
        assert_abs_diff_eq!(alpha1(&Vec3::zeros(), &Vec3::zeros(), &ed, &k1), ed);
        let a = alpha1(&Vec3::new(0.0, 0.0, 1.1), &Vec3::zeros(), &ed, &k1);
        assert_abs_diff_eq!(a.xy().norm(), ed.xy().norm(), epsilon = 1e-15);
        let a = alpha1(&Vec3::zeros(), &Vec3::new(1.0, 0.0, 0.0), &Vec3::zeros(), &Vec3::repeat(1.0));
        assert_abs_diff_eq!(a, Vec3::new(-1.0, 0.0, 0.0));
    }

    #[test]
    fn alpha2_examples() {
        let v = v();
        let z = Vec3::zeros();
        let k2 = Vec3::new(2.0, 3.0, 0.5);
        assert_eq!(alpha2(&v, &z, &z, &z, &z, &z, &z, &k2), z);
        let a = alpha2(&v, &z, &z, &z, &Vec3::new(1.0, 0.0, 0.0), &z, &z, &k2);
        assert_abs_diff_eq!(a, v.mass().column(0).into_owned(), epsilon = 1e-15);
        let a = alpha2(&v, &z, &z, &z, &z, &Vec3::repeat(1.0), &z, &k2);
        assert_abs_diff_eq!(a, Vec3::repeat(-1.0));
    }

    #[test]
    fn tau_c_examples() {
        let cfg = AsymSatConfig::cybership2();
        let k3 = Vec3::repeat(1.0);
        let s = ControllerScratch::default();
        assert_eq!(control_tau_c(&s, &Vec3::zeros(), &cfg, &k3), Vec3::zeros());
        let s = ControllerScratch {
            alpha2_dot: Vec3::new(1.0, 0.0, 0.0),
            z3: Vec3::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        assert_abs_diff_eq!(control_tau_c(&s, &Vec3::zeros(), &cfg, &k3), Vec3::zeros());
        // tau at 99% of the upper bound amplifies the feedforward by 1/(1 - 0.99^2)
        let tau = Vec3::new(0.99 * 5.0, 0.0, 0.0);
        let f = asym_gain_factor(&cfg, &tau);
        assert_abs_diff_eq!(1.0 / f[0], 50.251, epsilon = 1e-3);
        let s = ControllerScratch {
            alpha2_dot: Vec3::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        let tc = control_tau_c(&s, &tau, &cfg, &k3);
        assert_abs_diff_eq!(tc[0], (0.5 * tau[0] + 1.0) / f[0], epsilon = 1e-9);
    }

    #[test]
    fn singular_factor_is_clamped() {
        let (inv, n) = guarded_reciprocal(&Vec3::new(0.0, 1e-9, -1e-8));
        assert_eq!(n, 3);
        assert_eq!(inv, Vec3::new(1e6, 1e6, -1e6));
        let (inv, n) = guarded_reciprocal(&Vec3::new(2.0, -4.0, 1e-5));
        assert_eq!(n, 0);
        assert_abs_diff_eq!(inv, Vec3::new(0.5, -0.25, 1e5), epsilon = 1e-6);
        let cfg = AsymSatConfig::cybership2();
        let s = ControllerScratch {
            alpha2_dot: Vec3::repeat(1.0),
            ..Default::default()
        };
        let (tc, n) = control_tau_c_counted(&s, &cfg.tau_max, &cfg, &Vec3::repeat(1.0));
        assert_eq!(n, 3);
        assert!(tc.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn alpha3_examples() {
        let cfg = RateSatConfig::cybership2();
        let k3 = Vec3::new(2.0, 1.0, 5.0);
        let st = ActuatorState::default();
        assert_eq!(alpha3(&ControllerScratch::default(), &st, &cfg, &k3), Vec3::zeros());
        let s = ControllerScratch {
            alpha2_dot: Vec3::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        assert_abs_diff_eq!(alpha3(&s, &st, &cfg, &k3), Vec3::new(1.0, 0.0, 0.0));
        let near = ActuatorState {
            zeta: Vec3::new(4.9, 0.0, 0.0),
            ..Default::default()
        };
        let a = alpha3(&s, &near, &cfg, &k3);
        let f1 = 1.0 - (4.9f64 / 5.0).powi(2);
        assert_abs_diff_eq!(a[0], (0.2 * 4.0 / 5.0 * 4.9 + 1.0) / f1, epsilon = 1e-12);
    }

    #[test]
    fn tau_d_examples() {
        let cfg = RateSatConfig::cybership2();
        let k4 = Vec3::new(0.2, 0.5, 0.1);
        let s = ControllerScratch::default();
        assert_eq!(control_tau_d(&s, &ActuatorState::default(), &cfg, &k4), Vec3::zeros());
        let st = ActuatorState {
            tau_c: Vec3::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        let f2 = 1.0 - (1.0f64 / 3.2).powi(2);
        assert_abs_diff_eq!(control_tau_d(&s, &st, &cfg, &k4), Vec3::new(2.0 / f2, 0.0, 0.0), epsilon = 1e-12);
        let s = ControllerScratch {
            z4: Vec3::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        assert_abs_diff_eq!(
            control_tau_d(&s, &ActuatorState::default(), &cfg, &Vec3::repeat(0.2)),
            Vec3::new(-0.2, 0.0, 0.0)
        );
    }

    #[test]
    fn baselines() {
        let s = ControllerScratch {
            alpha2: Vec3::new(10.0, -10.0, 1.0),
            ..Default::default()
        };
        assert_eq!(baseline_unbounded(&s), s.alpha2);
        let cfg = AsymSatConfig::cybership2();
        assert_eq!(baseline_adhoc(&s, &cfg.tau_max, &cfg.tau_min), Vec3::new(5.0, -4.0, 1.0));
        let inside = ControllerScratch {
            alpha2: Vec3::new(1.0, -1.0, 0.5),
            ..Default::default()
        };
        assert_eq!(baseline_adhoc(&inside, &cfg.tau_max, &cfg.tau_min), baseline_unbounded(&inside));
    }

    #[test]
    fn backward_difference_examples() {
        let mut d = BackwardDifference::new(0.01);
        assert_eq!(d.update(Vec3::repeat(3.0)), None);
        assert_eq!(d.update(Vec3::repeat(3.0)), Some(Vec3::zeros()));
        let mut d = BackwardDifference::new(0.01);
        let s = Vec3::new(1.0, -2.0, 0.5);
        d.update(Vec3::zeros());
        for k in 1..50 {
            let got = d.update(s * (k as f64 * 0.01)).unwrap();
            assert_abs_diff_eq!(got, s, epsilon = 1e-9);
        }
        assert_eq!(alpha_derivative(None, &s, 0.1), Vec3::zeros());
        assert_abs_diff_eq!(alpha_derivative(Some(&Vec3::zeros()), &s, 0.5), s * 2.0);
        d.reset();
        assert_eq!(d.update(s), None);
    }

    #[test]
    fn backward_difference_truncation_bound() {
        let (w, dt) = (3.0, 0.01);
        let mut d = BackwardDifference::new(dt);
        d.update(Vec3::zeros());
        for k in 1..2000 {
            let t = k as f64 * dt;
            let got = d.update(Vec3::repeat((w * t).sin())).unwrap();
            assert!((got[0] - w * (w * t).cos()).abs() <= w * w * dt / 2.0 + 1e-12);
        }
    }

    fn input_at<'a>(eta: &'a Vec3, nu: &'a Vec3, bh: &'a Vec3, r: &'a ReferenceSample, a: &'a ActuatorState) -> ControlInput<'a> {
        ControlInput {
            eta,
            nu,
            b_hat: bh,
            reference: r,
            actuator: a,
        }
    }

    #[test]
    fn zero_error_fixed_point_reduces_to_feedforward() {
        let v = v();
        let r = ellipse_ref(37.0);
        let bh = Vec3::new(0.2, -0.1, 0.05);
        let cfg = AsymSatConfig::cybership2();
        // tau equal to alpha2 computed with alpha1_dot = 0 and z1 = z2 = 0
        let nu = r.nu_d;
        let s0 = ControllerScratch::default();
        let a2 = alpha2(&v, &nu, &s0.z1, &s0.z2, &Vec3::zeros(), &bh, &r.eta_d, &Vec3::repeat(1.0));
        let act = ActuatorState {
            zeta: a2,
            ..Default::default()
        };
        let mut c = Controller::new(Method::ProposedAsym, GainSet::asym_table(), ActuatorConfig::Asym(cfg), 0.01).unwrap();
        let out = c.step(&v, input_at(&r.eta_d, &nu, &bh, &r, &act));
        let s = out.scratch;
        assert!(s.z1.norm() < 1e-12 && s.z2.norm() < 1e-12 && s.z3.norm() < 1e-12, "{s:?}");
        let f = asym_gain_factor(&cfg, &a2);
        let ff = cfg.rho.component_mul(&a2).component_div(&f);
        assert_abs_diff_eq!(out.command, ff, epsilon = 1e-10);
    }

    #[test]
    fn derivative_warm_up_cascades() {
        let v = v();
        let cfg = RateSatConfig::cybership2();
        let mut c =
            Controller::new(Method::ProposedMagrate, GainSet::magrate_table(), ActuatorConfig::Magrate(cfg), 0.01).unwrap();
        let act = ActuatorState::default();
        let eta = Vec3::new(-1.0, 0.0, 0.01);
        let (nu, bh) = (Vec3::zeros(), Vec3::zeros());
        let mut outs = Vec::new();
        for k in 0..4 {
            let r = figure8_ref(k as f64 * 0.01);
            outs.push(c.step(&v, input_at(&eta, &nu, &bh, &r, &act)).scratch);
        }
        assert_eq!(outs[0].alpha1_dot, Vec3::zeros());
        assert_ne!(outs[1].alpha1_dot, Vec3::zeros());
        assert_eq!(outs[1].alpha2_dot, Vec3::zeros());
        assert_ne!(outs[2].alpha2_dot, Vec3::zeros());
        assert_eq!(outs[2].alpha3_dot, Vec3::zeros());
        assert_ne!(outs[3].alpha3_dot, Vec3::zeros());
    }

    #[test]
    fn rejects_mismatched_actuator() {
        let a = ActuatorConfig::Asym(AsymSatConfig::cybership2());
        let m = ActuatorConfig::Magrate(RateSatConfig::cybership2());
        assert!(Controller::new(Method::ProposedMagrate, GainSet::asym_table(), a, 0.01).is_err());
        assert!(Controller::new(Method::ProposedAsym, GainSet::asym_table(), m, 0.01).is_err());
        assert!(Controller::new(Method::Adhoc, GainSet::asym_table(), m, 0.01).is_ok());
        let mut g = GainSet::asym_table();
        g.k2[1] = 0.0;
        assert!(Controller::new(Method::Unbounded, g, a, 0.01).is_err());
    }

    #[test]
    fn doubling_gains_keeps_initial_correction_direction() {
        let v = v();
        let eta = Vec3::new(-1.0, 0.0, 0.01);
        let r = ellipse_ref(0.0);
        let z = Vec3::zeros();
        let act = ActuatorState::default();
        let cfg = ActuatorConfig::Asym(AsymSatConfig::cybership2());
        let sign = |g: GainSet| {
            let mut c = Controller::new(Method::ProposedAsym, g, cfg, 0.01).unwrap();
            c.step(&v, input_at(&eta, &z, &z, &r, &act)).command.map(f64::signum)
        };
        assert_eq!(sign(GainSet::asym_table()), sign(GainSet::asym_table().scaled(2.0)));
    }

    #[test]
    fn lyapunov_is_zero_only_at_zero_error() {
        let v = v();
        let s = ControllerScratch::default();
        for m in Method::ALL {
            assert_eq!(lyapunov_value(m, &v, &s, &Vec3::zeros()), 0.0);
        }
        let s = ControllerScratch {
            z4: Vec3::new(1.0, 0.0, 0.0),
            ..Default::default()
        };
        assert_eq!(lyapunov_value(Method::ProposedMagrate, &v, &s, &Vec3::zeros()), 0.5);
        assert_eq!(lyapunov_value(Method::ProposedAsym, &v, &s, &Vec3::zeros()), 0.0);
    }

    proptest! {
        #[test]
        fn z1_heading_in_half_open_interval(a in -50.0f64..50.0, b in -50.0f64..50.0) {
            let z = tracking_error_z1(&Vec3::new(0.0, 0.0, a), &Vec3::new(0.0, 0.0, b));
            prop_assert!(z[2] > -PI && z[2] <= PI);
            prop_assert!(((a - b - z[2]) / TAU - ((a - b - z[2]) / TAU).round()).abs() < 1e-9);
        }

        #[test]
        fn alpha1_aligned_zero_error_preserves_speed(psi in -10.0f64..10.0, x in -1.0f64..1.0, y in -1.0f64..1.0) {
            let ed = Vec3::new(x, y, 0.0);
            let a = alpha1(&Vec3::new(0.0, 0.0, psi), &Vec3::zeros(), &ed, &Vec3::repeat(2.0));
            prop_assert!((a.norm() - ed.norm()).abs() < 1e-12);
        }

        #[test]
        fn adhoc_output_within_bounds(a in proptest::array::uniform3(-100.0f64..100.0)) {
            let cfg = AsymSatConfig::cybership2();
            let s = ControllerScratch { alpha2: Vec3::from(a), ..Default::default() };
            let t = baseline_adhoc(&s, &cfg.tau_max, &cfg.tau_min);
            for i in 0..3 {
                prop_assert!(t[i] <= cfg.tau_max[i] && t[i] >= -cfg.tau_min[i]);
            }
        }
    }

    #[test]
    fn quarter_turn_alpha1() {
        let a = alpha1(&Vec3::new(0.0, 0.0, FRAC_PI_2), &Vec3::zeros(), &Vec3::new(1.0, 0.0, 0.0), &Vec3::repeat(1.0));
        assert_abs_diff_eq!(a, Vec3::new(0.0, -1.0, 0.0), epsilon = 1e-15);
    }
}
