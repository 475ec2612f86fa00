//! Run metrics and CSV traces.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::controller::{wrap_angle, ActuatorConfig, Method};
use crate::scenario::ScenarioConfig;
use crate::sim::{RunStatus, SimRecord, SimRun};
use crate::{Error, Result, Vec3};

pub const CSV_HEADER: [&str; 26] = [
    "t", "x", "y", "psi", "u", "v", "r", "xd", "yd", "psid", "tau1", "tau2", "tau3", "taud1", "taud2", "taud3", "b1",
    "b2", "b3", "bhat1", "bhat2", "bhat3", "z11", "z12", "z13", "V",
];

/// Position (m) and heading (rad) error band used for settling.
pub const SETTLE_THRESHOLD: f64 = 0.05;

/// Slack on the finite-difference rate check of the rate-limited actuator.
pub const RATE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetrics {
    pub method: Method,
    pub samples: usize,
    pub duration: f64,
    pub rmse_position: f64,
    pub rmse_heading: f64,
    /// Heading RMSE over the second half of the run.
    pub rmse_heading_tail: f64,
    pub max_abs_tau: Vec3,
    /// Largest finite-difference `|delta tau / dt|` per axis.
    pub max_abs_tau_rate: Vec3,
    /// Samples (record, axis) outside the actuator limits.
    pub constraint_violation_count: usize,
    /// First time after which both errors stay inside the settle band.
    pub settle_time_s: Option<f64>,
    /// Largest `||z1||` from `tail_start` on.
    pub max_z1_tail: f64,
    pub tail_start: f64,
    pub final_disturbance_error: f64,
    pub final_disturbance_norm: f64,
}

impl RunMetrics {
    pub fn settled(&self) -> bool {
        self.settle_time_s.is_some()
    }
}

/// Time from which the tail metrics are taken: 200 s, or half the run when
/// that is shorter.
pub fn tail_start(duration: f64) -> f64 {
    200.0f64.min(0.5 * duration)
}

fn sorted(records: &[SimRecord]) -> Vec<SimRecord> {
    let mut r = records.to_vec();
    r.sort_by(|a, b| a.t.total_cmp(&b.t));
    r
}

/// Counts `(record, axis)` samples outside the actuator limits: magnitude
/// bounds for both models, plus the finite-difference rate bound (with
/// [`RATE_TOL`] slack) for the magnitude and rate model.
pub fn count_violations(records: &[SimRecord], actuator: &ActuatorConfig) -> usize {
    let (up, lo) = actuator.magnitude_bounds();
    let mut n = 0;
    for r in records {
        n += (0..3).filter(|&i| r.tau[i] > up[i] || r.tau[i] < -lo[i]).count();
    }
    if let Some(rate) = actuator.rate_bounds() {
        for w in records.windows(2) {
            let dt = w[1].t - w[0].t;
            if dt > 0.0 {
                n += (0..3)
                    .filter(|&i| ((w[1].tau[i] - w[0].tau[i]) / dt).abs() > rate[i] + RATE_TOL)
                    .count();
            }
        }
    }
    n
}

pub fn compute_metrics(records: &[SimRecord], cfg: &ScenarioConfig) -> Result<RunMetrics> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let rec = sorted(records);
    let n = rec.len() as f64;
    let heading_err = |r: &SimRecord| wrap_angle(r.eta[2] - r.eta_d[2]);
    let pos_sq = |r: &SimRecord| (r.eta[0] - r.eta_d[0]).powi(2) + (r.eta[1] - r.eta_d[1]).powi(2);
    let rmse_position = (rec.iter().map(pos_sq).sum::<f64>() / n).sqrt();
    let rmse_heading = (rec.iter().map(|r| heading_err(r).powi(2)).sum::<f64>() / n).sqrt();
    let half = &rec[rec.len() / 2..];
    let rmse_heading_tail = (half.iter().map(|r| heading_err(r).powi(2)).sum::<f64>() / half.len() as f64).sqrt();

    let mut max_abs_tau = Vec3::zeros();
    for r in &rec {
        max_abs_tau = max_abs_tau.sup(&r.tau.abs());
    }
    let mut max_abs_tau_rate = Vec3::zeros();
    for w in rec.windows(2) {
        let dt = w[1].t - w[0].t;
        if dt > 0.0 {
            max_abs_tau_rate = max_abs_tau_rate.sup(&((w[1].tau - w[0].tau) / dt).abs());
        }
    }

    let inside = |r: &SimRecord| pos_sq(r).sqrt() < SETTLE_THRESHOLD && heading_err(r).abs() < SETTLE_THRESHOLD;
    let settle_time_s = match rec.iter().rposition(|r| !inside(r)) {
        None => Some(rec[0].t),
        Some(i) if i + 1 < rec.len() => Some(rec[i + 1].t),
        Some(_) => None,
    };

    let t_end = rec[rec.len() - 1].t;
    let t0 = rec[0].t;
    let tail = tail_start(t_end - t0) + t0;
    let max_z1_tail = rec
        .iter()
        .filter(|r| r.t >= tail)
        .map(|r| r.z1.norm())
        .fold(0.0, f64::max);
    let last = rec[rec.len() - 1];
    Ok(RunMetrics {
        method: cfg.method,
        samples: rec.len(),
        duration: t_end - t0,
        rmse_position,
        rmse_heading,
        rmse_heading_tail,
        max_abs_tau,
        max_abs_tau_rate,
        constraint_violation_count: count_violations(&rec, &cfg.actuator()),
        settle_time_s,
        max_z1_tail,
        tail_start: tail,
        final_disturbance_error: (last.b - last.b_hat).norm(),
        final_disturbance_norm: last.b.norm(),
    })
}

/// Reasons a run breaks the actuator invariants. Always empty for the
/// baselines. A proposed run fails when it does not complete or when any
/// sample leaves the actuator limits. A drive norm above its assumed bound
/// only loosens the effective bound towards the hard limit and is reported
/// as a warning in the run diagnostics.
pub fn invariant_failures(run: &SimRun, metrics: &RunMetrics) -> Vec<String> {
    let mut out = Vec::new();
    if !run.method.is_proposed() {
        return out;
    }
    match run.status {
        RunStatus::Completed => {}
        RunStatus::Diverged { t, norm } => out.push(format!("diverged at t = {t:.2} s (state norm {norm:.3e})")),
        RunStatus::NonFinite { t, index } => out.push(format!("non-finite state component {index} at t = {t:.2} s")),
    }
    if metrics.constraint_violation_count > 0 {
        out.push(format!("{} actuator limit violations", metrics.constraint_violation_count));
    }
    out
}

/// A step where the Lyapunov function grew by more than the allowed slack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovIncrease {
    pub t: f64,
    pub v: f64,
    pub dv: f64,
}

/// Steps after `transient` where `V` starts above `band` and increases by
/// more than `rel_tol * V`.
pub fn lyapunov_increases(records: &[SimRecord], transient: f64, band: f64, rel_tol: f64) -> Vec<LyapunovIncrease> {
    let t0 = records.first().map_or(0.0, |r| r.t);
    records
        .windows(2)
        .filter(|w| w[0].t >= t0 + transient && w[0].lyapunov > band)
        .filter_map(|w| {
            let dv = w[1].lyapunov - w[0].lyapunov;
            (dv > rel_tol * w[0].lyapunov).then_some(LyapunovIncrease {
                t: w[0].t,
                v: w[0].lyapunov,
                dv,
            })
        })
        .collect()
}

fn row(r: &SimRecord) -> [f64; 26] {
    let mut out = [0.0; 26];
    out[0] = r.t;
    let groups = [r.eta, r.nu, r.eta_d, r.tau, r.tau_rate, r.b, r.b_hat, r.z1];
    for (g, v) in groups.iter().enumerate() {
        out[1 + 3 * g..4 + 3 * g].copy_from_slice(v.as_slice());
    }
    out[25] = r.lyapunov;
    out
}

fn from_row(v: &[f64; 26]) -> SimRecord {
    let g = |k: usize| Vec3::new(v[1 + 3 * k], v[2 + 3 * k], v[3 + 3 * k]);
    SimRecord {
        t: v[0],
        eta: g(0),
        nu: g(1),
        eta_d: g(2),
        tau: g(3),
        tau_rate: g(4),
        b: g(5),
        b_hat: g(6),
        z1: g(7),
        lyapunov: v[25],
    }
}

pub fn write_csv_to<W: Write>(records: &[SimRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{}", CSV_HEADER.join(","))?;
    let mut line = String::with_capacity(26 * 18);
    for r in records {
        line.clear();
        for (i, x) in row(r).iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format!("{x:.9e}"));
        }
        line.push('\n');
        w.write_all(line.as_bytes())?;
    }
    w.flush()
}

/// Writes the trace with ten significant digits in scientific notation and
/// LF line endings.
pub fn write_csv(records: &[SimRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv_to(records, BufWriter::new(f)).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SimRecord>> {
    let path = path.as_ref();
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, msg: String| Error::Csv {
        path: path.into(),
        line,
        msg,
    };
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if i == 0 {
            if line.split(',').ne(CSV_HEADER.iter().copied()) {
                return Err(bad(1, format!("unexpected header {line:?}")));
            }
            continue;
        }
        let mut v = [0.0; 26];
        let mut count = 0;
        for (k, cell) in line.split(',').enumerate() {
            if k >= 26 {
                return Err(bad(i + 1, "too many columns".into()));
            }
            v[k] = cell
                .trim()
                .parse()
                .map_err(|e| bad(i + 1, format!("column {}: {e}", CSV_HEADER[k])))?;
            count += 1;
        }
        if count != 26 {
            return Err(bad(i + 1, format!("expected 26 columns, found {count}")));
        }
        out.push(from_row(&v));
    }
    Ok(out)
}
