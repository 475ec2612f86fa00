//! Smooth actuator saturation models.
//!
//! Asymmetric magnitude model, per axis:
//!
//! zeta_dot = (1 - (zeta / tau_b)^n) tau_c - rho zeta,
//! tau_b = tau_M if zeta > 0 else tau_m
//!
//! Magnitude and rate model, per axis:
//!
//! zeta_dot  = (1 - (zeta / tau_M)^n) tau_c - rho1 (tau_dM / tau_M) zeta
//! tau_c_dot = (1 - (tau_c / ((1 - rho1) tau_dM))^n) tau_d - rho2 tau_c
//!
//! In both cases `zeta` is the force actually delivered to the hull.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymSatConfig {
    /// Upper bounds (N, N, N m).
    #[serde(rename = "tau_M")]
    pub tau_max: Vec3,
    /// Lower-bound magnitudes; the lower bound itself is `-tau_m`.
    #[serde(rename = "tau_m")]
    pub tau_min: Vec3,
    pub rho: Vec3,
    pub n: u32,
    /// Assumed bound on the drive norm.
    #[serde(rename = "tau_cM")]
    pub tau_c_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSatConfig {
    #[serde(rename = "tau_M")]
    pub tau_max: Vec3,
    /// Rate bounds (N/s, N/s, N m/s).
    #[serde(rename = "tau_dM")]
    pub tau_rate_max: Vec3,
    pub rho1: Vec3,
    pub rho2: Vec3,
    pub n: u32,
    /// Assumed bound on the drive norm.
    #[serde(rename = "T_M")]
    pub tau_d_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ActuatorState {
    /// Model output, the applied actuation.
    pub zeta: Vec3,
    /// Intermediate state of the rate model; unused by the asymmetric model.
    pub tau_c: Vec3,
}

fn check_exponent(n: u32) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "saturation exponent n must be an even integer >= 2, got {n}"
        )));
    }
    Ok(())
}

fn check_positive(name: &str, v: &Vec3) -> Result<()> {
    if v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v:?}")));
    }
    Ok(())
}

fn check_scalar(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

impl AsymSatConfig {
    pub fn cybership2() -> Self {
        Self {
            tau_max: Vec3::new(5.0, 4.5, 4.0),
            tau_min: Vec3::new(4.0, 4.0, 3.0),
            rho: Vec3::repeat(0.5),
            n: 2,
            tau_c_max: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("tau_M", &self.tau_max)?;
        check_positive("tau_m", &self.tau_min)?;
        check_positive("rho", &self.rho)?;
        check_scalar("tau_cM", self.tau_c_max)?;
        check_exponent(self.n)
    }

    pub fn lower(&self) -> Vec3 {
        -self.tau_min
    }
}

impl RateSatConfig {
    pub fn cybership2() -> Self {
        Self {
            tau_max: Vec3::repeat(5.0),
            tau_rate_max: Vec3::repeat(4.0),
            rho1: Vec3::repeat(0.2),
            rho2: Vec3::repeat(2.0),
            n: 2,
            tau_d_max: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("tau_M", &self.tau_max)?;
        check_positive("tau_dM", &self.tau_rate_max)?;
        check_positive("rho2", &self.rho2)?;
        check_scalar("T_M", self.tau_d_max)?;
        if self.rho1.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
            return Err(Error::InvalidConfig(format!(
                "rho1 must lie in (0, 1), got {:?}",
                self.rho1
            )));
        }
        check_exponent(self.n)
    }

    /// Ceiling `(1 - rho1) tau_dM` on the intermediate state.
    pub fn tau_c_ceiling(&self) -> Vec3 {
        (Vec3::repeat(1.0) - self.rho1).component_mul(&self.tau_rate_max)
    }

    /// Per-axis decay ratio `rho1 tau_dM / tau_M`.
    pub fn zeta_decay(&self) -> Vec3 {
        self.rho1.component_mul(&self.tau_rate_max).component_div(&self.tau_max)
    }
}

#[inline]
pub(crate) fn pow_even(x: f64, n: u32) -> f64 {
    let s = x * x;
    match n {
        2 => s,
        4 => s * s,
        _ => s.powi((n / 2) as i32),
    }
}

pub fn q_switch(zeta_i: f64) -> f64 {
    if zeta_i > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Diagonal of `Q (I - G_M) + (I - Q)(I - G_m)`.
pub fn asym_gain_factor(cfg: &AsymSatConfig, zeta: &Vec3) -> Vec3 {
    Vec3::from_fn(|i, _| {
        let q = q_switch(zeta[i]);
        let g_up = pow_even(zeta[i] / cfg.tau_max[i], cfg.n);
        let g_lo = pow_even(zeta[i] / cfg.tau_min[i], cfg.n);
        q * (1.0 - g_up) + (1.0 - q) * (1.0 - g_lo)
    })
}

pub fn asym_sat_deriv(state: &ActuatorState, tau_c: &Vec3, cfg: &AsymSatConfig) -> Vec3 {
    asym_sat_deriv_raw(&state.zeta, tau_c, cfg)
}

pub(crate) fn asym_sat_deriv_raw(zeta: &Vec3, tau_c: &Vec3, cfg: &AsymSatConfig) -> Vec3 {
    asym_gain_factor(cfg, zeta).component_mul(tau_c) - cfg.rho.component_mul(zeta)
}

/// Diagonals of `I - G_1` and `I - G_2`.
pub fn rate_gain_factors(cfg: &RateSatConfig, state: &ActuatorState) -> (Vec3, Vec3) {
    let ceiling = cfg.tau_c_ceiling();
    let f1 = Vec3::from_fn(|i, _| 1.0 - pow_even(state.zeta[i] / cfg.tau_max[i], cfg.n));
    let f2 = Vec3::from_fn(|i, _| 1.0 - pow_even(state.tau_c[i] / ceiling[i], cfg.n));
    (f1, f2)
}

pub fn rate_sat_deriv(state: &ActuatorState, tau_d: &Vec3, cfg: &RateSatConfig) -> (Vec3, Vec3) {
    let (f1, f2) = rate_gain_factors(cfg, state);
    let zeta_dot = f1.component_mul(&state.tau_c) - cfg.zeta_decay().component_mul(&state.zeta);
    let tau_c_dot = f2.component_mul(tau_d) - cfg.rho2.component_mul(&state.tau_c);
    (zeta_dot, tau_c_dot)
}

/// Largest value the asymmetric model output can reach on axis `i`.
pub fn effective_upper_bound(cfg: &AsymSatConfig, i: usize) -> f64 {
    effective_bound(cfg.tau_max[i], cfg.rho[i], cfg.tau_c_max, cfg.n)
}

/// Magnitude of the most negative value the asymmetric model output can
/// reach on axis `i`.
pub fn effective_lower_bound(cfg: &AsymSatConfig, i: usize) -> f64 {
    effective_bound(cfg.tau_min[i], cfg.rho[i], cfg.tau_c_max, cfg.n)
}

fn effective_bound(limit: f64, rho: f64, drive: f64, n: u32) -> f64 {
    limit * (drive / (drive + rho * limit)).powf(1.0 / n as f64)
}

/// Bound on `|tau_c,i|` of the rate model under `||tau_d|| <= T_M`.
pub fn rate_intermediate_bound(cfg: &RateSatConfig, i: usize) -> f64 {
    let ceiling = (1.0 - cfg.rho1[i]) * cfg.tau_rate_max[i];
    effective_bound(ceiling, cfg.rho2[i], cfg.tau_d_max, cfg.n)
}
