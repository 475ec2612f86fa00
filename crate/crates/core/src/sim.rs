//! Closed-loop simulation.
//!
//! Plant, observer and actuator model share one state vector
//! `[eta, nu, z_obs, zeta, tau_c]` (`tau_c` only for the magnitude and rate
//! model) advanced by classical RK4. The controller is sampled once per step
//! and its command held over the step.

use log::warn;
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::controller::{lyapunov_value, ActuatorConfig, ControlInput, Controller, Method};
use crate::observer::{estimate_raw, observer_deriv_raw};
use crate::saturation::{asym_sat_deriv_raw, rate_sat_deriv, ActuatorState};
use crate::scenario::ScenarioConfig;
use crate::vessel::{kinematics_deriv, Vessel};
use crate::{Error, Result, Vec3};

/// Runs stop once the state norm exceeds this value.
pub const DIVERGENCE_NORM: f64 = 1e6;

/// `b_i(t) = A_i sin(w_i t + phi_i) + c_i`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisturbanceSpec {
    pub amplitude: Vec3,
    pub frequency: Vec3,
    pub phase: Vec3,
    pub offset: Vec3,
}

impl Default for DisturbanceSpec {
    fn default() -> Self {
        Self {
            amplitude: Vec3::new(0.4, 0.4, 0.2),
            frequency: Vec3::new(0.05, 0.04, 0.03),
            phase: Vec3::zeros(),
            offset: Vec3::new(0.2, 0.2, 0.1),
        }
    }
}

impl DisturbanceSpec {
    pub fn zero() -> Self {
        Self {
            amplitude: Vec3::zeros(),
            frequency: Vec3::zeros(),
            phase: Vec3::zeros(),
            offset: Vec3::zeros(),
        }
    }

    pub fn constant(offset: Vec3) -> Self {
        Self { offset, ..Self::zero() }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.amplitude, self.frequency, self.phase, self.offset];
        if all.iter().flat_map(|v| v.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("disturbance parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn derivative(&self, t: f64) -> Vec3 {
        Vec3::from_fn(|i, _| self.amplitude[i] * self.frequency[i] * (self.frequency[i] * t + self.phase[i]).cos())
    }

    /// Bound on `||b_dot||`, `||A o w||`.
    pub fn rate_bound(&self) -> f64 {
        self.amplitude.component_mul(&self.frequency).norm()
    }

    pub fn is_constant(&self) -> bool {
        self.rate_bound() == 0.0
    }
}

pub fn disturbance_signal(t: f64, spec: &DisturbanceSpec) -> Vec3 {
    Vec3::from_fn(|i, _| spec.amplitude[i] * (spec.frequency[i] * t + spec.phase[i]).sin() + spec.offset[i])
}

/// One classical Runge-Kutta step. Fails on the first non-finite stage
/// derivative.
pub fn rk4_step<F>(t: f64, x: &DVector<f64>, dt: f64, mut f: F) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> DVector<f64>,
{
    let check = |k: DVector<f64>, ts: f64| -> Result<DVector<f64>> {
        match k.iter().position(|v| !v.is_finite()) {
            Some(index) => Err(Error::NonFinite { t: ts, index }),
            None => Ok(k),
        }
    };
    let h2 = 0.5 * dt;
    let k1 = check(f(t, x), t)?;
    let k2 = check(f(t + h2, &(x + &k1 * h2)), t + h2)?;
    let k3 = check(f(t + h2, &(x + &k2 * h2)), t + h2)?;
    let k4 = check(f(t + dt, &(x + &k3 * dt)), t + dt)?;
    Ok(x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimRecord {
    pub t: f64,
    pub eta: Vec3,
    pub nu: Vec3,
    pub eta_d: Vec3,
    /// Force acting on the hull.
    pub tau: Vec3,
    /// Time derivative of `tau`: the model vector field for the proposed
    /// methods, a backward difference for the baselines.
    pub tau_rate: Vec3,
    pub b: Vec3,
    pub b_hat: Vec3,
    pub z1: Vec3,
    pub lyapunov: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Diverged { t: f64, norm: f64 },
    NonFinite { t: f64, index: usize },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Diagnostics {
    /// Largest norm of the actuator-model drive (`tau_c` or `tau_d`).
    pub max_command_norm: f64,
    pub command_bound: f64,
    /// First time the drive norm exceeded its assumed bound.
    pub command_bound_exceeded_at: Option<f64>,
    pub clamp_events: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SimRun {
    pub method: Method,
    pub records: Vec<SimRecord>,
    pub status: RunStatus,
    pub diagnostics: Diagnostics,
}

impl SimRun {
    pub fn completed(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

const ETA: usize = 0;
const NU: usize = 3;
const OBS: usize = 6;
const ZETA: usize = 9;
const TAU_C: usize = 12;

fn get3(x: &DVector<f64>, at: usize) -> Vec3 {
    Vec3::new(x[at], x[at + 1], x[at + 2])
}

fn put3(x: &mut DVector<f64>, at: usize, v: &Vec3) {
    x.rows_mut(at, 3).copy_from(v);
}

struct Plant<'a> {
    vessel: &'a Vessel,
    method: Method,
    actuator: ActuatorConfig,
    k0: Vec3,
    disturbance: DisturbanceSpec,
}

impl Plant<'_> {
    fn actuator_state(&self, x: &DVector<f64>) -> ActuatorState {
        ActuatorState {
            zeta: get3(x, ZETA),
            tau_c: if x.len() > TAU_C { get3(x, TAU_C) } else { Vec3::zeros() },
        }
    }

    fn applied(&self, x: &DVector<f64>, command: &Vec3) -> Vec3 {
        if self.method.is_proposed() {
            get3(x, ZETA)
        } else {
            *command
        }
    }

    fn actuator_deriv(&self, act: &ActuatorState, command: &Vec3) -> (Vec3, Vec3) {
        match (self.method, &self.actuator) {
            (Method::ProposedAsym, ActuatorConfig::Asym(c)) => (asym_sat_deriv_raw(&act.zeta, command, c), Vec3::zeros()),
            (Method::ProposedMagrate, ActuatorConfig::Magrate(c)) => rate_sat_deriv(act, command, c),
            _ => (Vec3::zeros(), Vec3::zeros()),
        }
    }

    fn deriv(&self, t: f64, x: &DVector<f64>, command: &Vec3) -> DVector<f64> {
        let eta = get3(x, ETA);
        let nu = get3(x, NU);
        let z = get3(x, OBS);
        let tau = self.applied(x, command);
        let b = disturbance_signal(t, &self.disturbance);
        let mut dx = DVector::zeros(x.len());
        put3(&mut dx, ETA, &kinematics_deriv(&eta, &nu));
        put3(&mut dx, NU, &self.vessel.dynamics_deriv(&nu, &tau, &b));
        put3(&mut dx, OBS, &observer_deriv_raw(&z, &self.k0, self.vessel, &nu, &tau));
        let (dzeta, dtc) = self.actuator_deriv(&self.actuator_state(x), command);
        put3(&mut dx, ZETA, &dzeta);
        if x.len() > TAU_C {
            put3(&mut dx, TAU_C, &dtc);
        }
        dx
    }
}

/// Integrates a scenario from rest of the actuator model (`zeta = 0`,
/// `tau_c = 0`) with the observer started at `b_hat = 0`, recording every control step
/// including `t = 0` and the final time.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SimRun> {
    cfg.validate()?;
    let vessel = cfg.vessel()?;
    let traj = cfg.trajectory.trajectory();
    let actuator = cfg.actuator();
    let mut controller = Controller::new(cfg.method, cfg.gains(), actuator, cfg.dt)?;
    let plant = Plant {
        vessel: &vessel,
        method: cfg.method,
        actuator,
        k0: cfg.observer.k0,
        disturbance: cfg.disturbance,
    };
    let dim = if matches!(cfg.method, Method::ProposedMagrate) { 15 } else { 12 };
    let mut x = DVector::zeros(dim);
    put3(&mut x, ETA, &cfg.initial.eta);
    put3(&mut x, NU, &cfg.initial.nu);
    put3(
        &mut x,
        OBS,
        &-cfg.observer.k0.component_mul(&(vessel.mass() * cfg.initial.nu)),
    );

    let steps = cfg.steps();
    let h = cfg.dt / cfg.substeps as f64;
    let mut records = Vec::with_capacity(steps + 1);
    let mut diag = Diagnostics {
        command_bound: actuator.drive_bound(),
        ..Default::default()
    };
    let mut status = RunStatus::Completed;
    let mut prev_tau: Option<Vec3> = None;

    for k in 0..=steps {
        let t = k as f64 * cfg.dt;
        let eta = get3(&x, ETA);
        let nu = get3(&x, NU);
        let act = plant.actuator_state(&x);
        let b = disturbance_signal(t, &cfg.disturbance);
        let b_hat = estimate_raw(&get3(&x, OBS), &cfg.observer.k0, &vessel, &nu);
        let reference = traj.sample(t);
        let out = controller.step(
            &vessel,
            ControlInput {
                eta: &eta,
                nu: &nu,
                b_hat: &b_hat,
                reference: &reference,
                actuator: &act,
            },
        );
        let tau = plant.applied(&x, &out.command);
        let tau_rate = if cfg.method.is_proposed() {
            plant.actuator_deriv(&act, &out.command).0
        } else {
            prev_tau.map_or_else(Vec3::zeros, |p| (tau - p) / cfg.dt)
        };
        prev_tau = Some(tau);
        if cfg.method.is_proposed() {
            let n = out.command.norm();
            diag.max_command_norm = diag.max_command_norm.max(n);
            if n > diag.command_bound && diag.command_bound_exceeded_at.is_none() {
                diag.command_bound_exceeded_at = Some(t);
                let msg = format!(
                    "drive norm {n:.4} exceeds the assumed bound {} at t = {t:.2} s",
                    diag.command_bound
                );
                warn!("{msg}");
                diag.warnings.push(msg);
            }
        }
        records.push(SimRecord {
            t,
            eta,
            nu,
            eta_d: reference.eta_d,
            tau,
            tau_rate,
            b,
            b_hat,
            z1: out.scratch.z1,
            lyapunov: lyapunov_value(cfg.method, &vessel, &out.scratch, &(b - b_hat)),
        });
        if k == steps {
            break;
        }

        let mut ts = t;
        let mut failed = None;
        for _ in 0..cfg.substeps {
            match rk4_step(ts, &x, h, |tt, xx| plant.deriv(tt, xx, &out.command)) {
                Ok(nx) => x = nx,
                Err(Error::NonFinite { t, index }) => {
                    failed = Some(RunStatus::NonFinite { t, index });
                    break;
                }
                Err(e) => return Err(e),
            }
            ts += h;
        }
        if failed.is_none() {
            let norm = x.norm();
            if norm > DIVERGENCE_NORM || !norm.is_finite() {
                failed = Some(RunStatus::Diverged { t: t + cfg.dt, norm });
            }
        }
        if let Some(s) = failed {
            let msg = format!("run aborted: {s:?}");
            warn!("{msg}");
            diag.warnings.push(msg);
            status = s;
            break;
        }
    }
    diag.clamp_events = controller.clamp_events();
    if diag.clamp_events > 0 {
        diag.warnings
            .push(format!("{} gain-factor entries clamped near singularity", diag.clamp_events));
    }
    Ok(SimRun {
        method: cfg.method,
        records,
        status,
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::StartPoint;
    use crate::trajectory::TrajectoryPreset;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn disturbance_examples() {
        let z = DisturbanceSpec::zero();
        for t in [0.0, 1.0, 1e3] {
            assert_eq!(disturbance_signal(t, &z), Vec3::zeros());
        }
        let s = DisturbanceSpec {
            amplitude: Vec3::new(1.0, 0.0, 0.0),
            frequency: Vec3::new(0.1, 0.3, 0.2),
            ..DisturbanceSpec::zero()
        };
        assert_eq!(disturbance_signal(0.0, &s), Vec3::zeros());
        assert_abs_diff_eq!(s.derivative(0.0), Vec3::new(0.1, 0.0, 0.0));
        let d = DisturbanceSpec::default();
        let mut peak: f64 = 0.0;
        for k in 0..200_000 {
            peak = peak.max(disturbance_signal(k as f64 * 0.01, &d)[0].abs());
        }
        assert!(peak <= 0.6 && peak > 0.5999);
    }

    #[test]
    fn rk4_examples() {
        let x = DVector::from_vec(vec![1.0, -2.0]);
        let y = rk4_step(0.0, &x, 0.1, |_, x| DVector::zeros(x.len())).unwrap();
        assert_eq!(y, x);
        let x = DVector::from_vec(vec![1.0]);
        let y = rk4_step(0.0, &x, 0.01, |_, x| -x).unwrap();
        assert_abs_diff_eq!(y[0], 0.9900498337, epsilon = 1e-10);
        let e = rk4_step(0.0, &x, 0.01, |t, x| if t > 0.0 { x * f64::NAN } else { x.clone() });
        assert!(matches!(e, Err(Error::NonFinite { index: 0, .. })));
    }

    #[test]
    fn two_records_for_a_single_step() {
        let mut c = ScenarioConfig::preset(Method::ProposedAsym, TrajectoryPreset::Ellipse, StartPoint::P1);
        c.duration = Some(0.01);
        let r = run_scenario(&c).unwrap();
        assert_eq!(r.records.len(), 2);
        assert_eq!(r.records[0].t, 0.0);
        assert_eq!(r.records[1].t, 0.01);
    }

    #[test]
    fn zero_initial_error_stays_near_reference() {
        for (m, t) in [(Method::ProposedAsym, TrajectoryPreset::Ellipse)] {
            let mut c = ScenarioConfig::preset(m, t, StartPoint::P1);
            let r0 = t.trajectory().sample(0.0);
            c.initial.eta = r0.eta_d;
            c.initial.nu = r0.nu_d;
            c.disturbance = DisturbanceSpec::zero();
            c.duration = Some(100.0);
            let run = run_scenario(&c).unwrap();
            assert!(run.completed());
            let worst = run.records.iter().map(|r| r.z1.norm()).fold(0.0, f64::max);
            assert!(worst <= 1e-2, "{m}: {worst}");
        }
    }

    #[test]
    fn divergence_is_reported_with_partial_output() {
        let mut c = ScenarioConfig::preset(Method::Unbounded, TrajectoryPreset::Ellipse, StartPoint::P1);
        c.initial.nu = Vec3::new(1e7, 0.0, 0.0);
        c.duration = Some(1.0);
        let run = run_scenario(&c).unwrap();
        assert!(matches!(run.status, RunStatus::Diverged { .. } | RunStatus::NonFinite { .. }), "{:?}", run.status);
        assert!(!run.records.is_empty());
        assert!(run.records.len() < 101);
    }

    #[test]
    fn runs_are_bit_identical() {
        let mut c = ScenarioConfig::preset(Method::ProposedMagrate, TrajectoryPreset::Figure8, StartPoint::P2);
        c.duration = Some(20.0);
        let a = run_scenario(&c).unwrap().records;
        let b = run_scenario(&c).unwrap().records;
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.eta.map(f64::to_bits), y.eta.map(f64::to_bits));
            assert_eq!(x.tau.map(f64::to_bits), y.tau.map(f64::to_bits));
            assert_eq!(x.lyapunov.to_bits(), y.lyapunov.to_bits());
        }
    }

    #[test]
    fn baseline_rate_is_backward_difference() {
        let mut c = ScenarioConfig::preset(Method::Adhoc, TrajectoryPreset::Figure8, StartPoint::P1);
        c.duration = Some(1.0);
        let run = run_scenario(&c).unwrap();
        assert_eq!(run.records[0].tau_rate, Vec3::zeros());
        for w in run.records.windows(2) {
            assert_abs_diff_eq!(w[1].tau_rate, (w[1].tau - w[0].tau) / c.dt, epsilon = 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn disturbance_rate_within_bound(a in proptest::array::uniform3(-2.0f64..2.0),
                                         w in proptest::array::uniform3(0.0f64..3.0),
                                         p in proptest::array::uniform3(-3.0f64..3.0),
                                         t in 0.0f64..1e3) {
            let s = DisturbanceSpec { amplitude: a.into(), frequency: w.into(), phase: p.into(), offset: Vec3::zeros() };
            prop_assert!(s.derivative(t).norm() <= s.rate_bound() + 1e-12);
            let h = 1e-5;
            let fd = (disturbance_signal(t + h, &s) - disturbance_signal(t - h, &s)) / (2.0 * h);
            prop_assert!((fd - s.derivative(t)).norm() < 1e-6);
        }
    }
}
