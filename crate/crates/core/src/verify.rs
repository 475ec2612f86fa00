//! Randomised bound checks for the saturation models.
//!
//! Each suite drives the model open loop with many bounded drive signals and
//! records the extreme values reached. Signals are grouped in batches that
//! share a drive family so the inner loops run over flat per-lane arrays
//! (one lane per signal and axis) and vectorise.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::saturation::{
    effective_lower_bound, effective_upper_bound, pow_even, rate_intermediate_bound, AsymSatConfig,
    RateSatConfig,
};
use crate::Vec3;

/// Slack allowed on every bound comparison.
pub const BOUND_TOL: f64 = 1e-6;

const BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FuzzOptions {
    pub signals: usize,
    pub dt: f64,
    pub duration: f64,
    pub seed: u64,
}

impl Default for FuzzOptions {
    fn default() -> Self {
        Self {
            signals: 10_000,
            dt: 1e-3,
            duration: 100.0,
            seed: 0x5eed,
        }
    }
}

impl FuzzOptions {
    fn steps(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveFamily {
    Constant,
    PiecewiseConstant,
    BangBang,
    Phasor,
}

impl DriveFamily {
    pub const ALL: [DriveFamily; 4] = [
        DriveFamily::Constant,
        DriveFamily::PiecewiseConstant,
        DriveFamily::BangBang,
        DriveFamily::Phasor,
    ];
}

fn in_ball(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n <= 1.0 && n > 1e-3 {
            return v;
        }
    }
}

fn on_sphere(rng: &mut ChaCha8Rng) -> Vec3 {
    in_ball(rng).normalize()
}

/// Zero-order-hold drive generator for a batch of signals of one family.
/// Every generated vector has Euclidean norm at most `bound`.
struct DriveBatch {
    family: DriveFamily,
    bound: f64,
    dt: f64,
    rng: ChaCha8Rng,
    /// Current drive, lane-major (signal * 3 + axis).
    values: Vec<f64>,
    countdown: Vec<usize>,
    signs: Vec<f64>,
    // bang-bang directions; phasor amplitudes
    dirs: Vec<Vec3>,
    // phasor state: cos, sin and per-step rotation per lane
    cos: Vec<f64>,
    sin: Vec<f64>,
    rot_c: Vec<f64>,
    rot_s: Vec<f64>,
}

impl DriveBatch {
    fn new(family: DriveFamily, count: usize, first_signal: usize, bound: f64, dt: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lanes = 3 * count;
        let mut b = DriveBatch {
            family,
            bound,
            dt,
            values: vec![0.0; lanes],
            countdown: vec![0; count],
            signs: vec![1.0; count],
            dirs: vec![Vec3::zeros(); count],
            cos: vec![0.0; lanes],
            sin: vec![0.0; lanes],
            rot_c: vec![1.0; lanes],
            rot_s: vec![0.0; lanes],
            rng: ChaCha8Rng::seed_from_u64(0),
        };
        for s in 0..count {
            match family {
                DriveFamily::Constant => {
                    // the first six signals overall are the axis-aligned extremes
                    let global = first_signal + s;
                    let v = if global < 6 {
                        let mut e = Vec3::zeros();
                        e[global / 2] = if global % 2 == 0 { 1.0 } else { -1.0 };
                        e
                    } else if rng.gen_bool(0.5) {
                        on_sphere(&mut rng)
                    } else {
                        in_ball(&mut rng)
                    };
                    b.set(s, v * bound);
                }
                DriveFamily::PiecewiseConstant | DriveFamily::BangBang => {
                    b.dirs[s] = on_sphere(&mut rng);
                }
                DriveFamily::Phasor => {
                    let amp = on_sphere(&mut rng);
                    b.dirs[s] = amp;
                    for a in 0..3 {
                        let l = 3 * s + a;
                        let w = 10f64.powf(rng.gen_range(-2.0..1.7));
                        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                        (b.sin[l], b.cos[l]) = phase.sin_cos();
                        (b.rot_s[l], b.rot_c[l]) = (w * dt).sin_cos();
                    }
                }
            }
        }
        b.rng = rng;
        b.refresh(true);
        b
    }

    fn set(&mut self, s: usize, v: Vec3) {
        self.values[3 * s..3 * s + 3].copy_from_slice(v.as_slice());
    }

    fn refresh(&mut self, initial: bool) {
        let count = self.countdown.len();
        match self.family {
            DriveFamily::Constant => {}
            DriveFamily::PiecewiseConstant => {
                for s in 0..count {
                    if self.countdown[s] == 0 {
                        let v = if self.rng.gen_bool(0.5) {
                            on_sphere(&mut self.rng)
                        } else {
                            in_ball(&mut self.rng)
                        };
                        self.set(s, v * self.bound);
                        self.countdown[s] = self.dwell(0.05, 10.0);
                    }
                    self.countdown[s] -= 1;
                }
            }
            DriveFamily::BangBang => {
                for s in 0..count {
                    if self.countdown[s] == 0 {
                        if !initial {
                            self.signs[s] = -self.signs[s];
                        }
                        let sign = self.signs[s];
                        let v = self.dirs[s] * (sign * self.bound);
                        self.set(s, v);
                        self.countdown[s] = self.dwell(0.01, 5.0);
                    }
                    self.countdown[s] -= 1;
                }
            }
            DriveFamily::Phasor => {
                for s in 0..count {
                    for a in 0..3 {
                        let l = 3 * s + a;
                        if !initial {
                            let (c, sn) = (self.cos[l], self.sin[l]);
                            self.cos[l] = c * self.rot_c[l] - sn * self.rot_s[l];
                            self.sin[l] = sn * self.rot_c[l] + c * self.rot_s[l];
                        }
                        // keep |cos| <= 1 despite rounding drift
                        let c = self.cos[l].clamp(-1.0, 1.0);
                        self.values[l] = self.bound * self.dirs[s][a] * c;
                    }
                }
            }
        }
    }

    fn dwell(&mut self, lo: f64, hi: f64) -> usize {
        ((self.rng.gen_range(lo..hi) / self.dt).round() as usize).max(1)
    }

    fn max_norm(&self) -> f64 {
        self.values
            .chunks_exact(3)
            .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymFuzzReport {
    pub signals: usize,
    pub steps: usize,
    pub zeta_max: Vec3,
    pub zeta_min: Vec3,
    /// Upper effective bounds.
    pub upper: Vec3,
    /// Lower effective bound magnitudes.
    pub lower: Vec3,
    pub max_drive_norm: f64,
    pub drive_bound: f64,
    pub elapsed: Duration,
}

impl AsymFuzzReport {
    pub fn passed(&self) -> bool {
        self.max_drive_norm <= self.drive_bound * (1.0 + 1e-12)
            && (0..3).all(|i| {
                self.zeta_max[i] <= self.upper[i] + BOUND_TOL && self.zeta_min[i] >= -self.lower[i] - BOUND_TOL
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateFuzzReport {
    pub signals: usize,
    pub steps: usize,
    pub zeta_abs_max: Vec3,
    pub tau_c_abs_max: Vec3,
    /// Largest |zeta_dot| from the model vector field at the step states.
    pub zeta_rate_abs_max: Vec3,
    /// Largest |delta zeta| / dt between consecutive steps.
    pub zeta_fd_rate_abs_max: Vec3,
    pub tau_max: Vec3,
    pub tau_c_ceiling: Vec3,
    pub tau_c_bound: Vec3,
    pub tau_rate_max: Vec3,
    pub max_drive_norm: f64,
    pub drive_bound: f64,
    pub elapsed: Duration,
}

impl RateFuzzReport {
    pub fn passed(&self) -> bool {
        self.max_drive_norm <= self.drive_bound * (1.0 + 1e-12)
            && (0..3).all(|i| {
                self.zeta_abs_max[i] <= self.tau_max[i]
                    && self.tau_c_abs_max[i] <= self.tau_c_ceiling[i]
                    && self.zeta_rate_abs_max[i] <= self.tau_rate_max[i] + BOUND_TOL
            })
    }
}

struct AsymLanes {
    inv_up: Vec<f64>,
    inv_lo: Vec<f64>,
    rho: Vec<f64>,
}

#[inline(always)]
fn asym_axis(z: f64, d: f64, inv_up: f64, inv_lo: f64, rho: f64, n: u32) -> f64 {
    let inv = if z > 0.0 { inv_up } else { inv_lo };
    (1.0 - pow_even(z * inv, n)) * d - rho * z
}

fn asym_batch(cfg: &AsymSatConfig, p: &AsymLanes, drive: &mut DriveBatch, steps: usize, dt: f64) -> (Vec3, Vec3, f64) {
    let lanes = drive.values.len();
    let n = cfg.n;
    let mut z = vec![0.0; lanes];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes]);
    let mut hi = vec![0.0f64; lanes];
    let mut lo = vec![0.0f64; lanes];
    let mut drive_norm = drive.max_norm();
    let (inv_up, inv_lo, rho) = (&p.inv_up[..lanes], &p.inv_lo[..lanes], &p.rho[..lanes]);
    for step in 0..steps {
        if step > 0 {
            drive.refresh(false);
            if drive.family != DriveFamily::Constant {
                drive_norm = drive_norm.max(drive.max_norm());
            }
        }
        let d = &drive.values[..];
        for l in 0..lanes {
            k1[l] = asym_axis(z[l], d[l], inv_up[l], inv_lo[l], rho[l], n);
        }
        for l in 0..lanes {
            k2[l] = asym_axis(z[l] + 0.5 * dt * k1[l], d[l], inv_up[l], inv_lo[l], rho[l], n);
        }
        for l in 0..lanes {
            k3[l] = asym_axis(z[l] + 0.5 * dt * k2[l], d[l], inv_up[l], inv_lo[l], rho[l], n);
        }
        for l in 0..lanes {
            k4[l] = asym_axis(z[l] + dt * k3[l], d[l], inv_up[l], inv_lo[l], rho[l], n);
        }
        for l in 0..lanes {
            z[l] += dt / 6.0 * (k1[l] + 2.0 * k2[l] + 2.0 * k3[l] + k4[l]);
            hi[l] = hi[l].max(z[l]);
            lo[l] = lo[l].min(z[l]);
        }
    }
    let mut zmax = Vec3::repeat(f64::NEG_INFINITY);
    let mut zmin = Vec3::repeat(f64::INFINITY);
    for l in 0..lanes {
        let a = l % 3;
        zmax[a] = zmax[a].max(hi[l]);
        zmin[a] = zmin[a].min(lo[l]);
    }
    (zmax, zmin, drive_norm)
}

fn batches(total: usize) -> impl Iterator<Item = (usize, usize, DriveFamily)> {
    (0..total.div_ceil(BATCH)).map(move |b| {
        let start = b * BATCH;
        (start, BATCH.min(total - start), DriveFamily::ALL[b % DriveFamily::ALL.len()])
    })
}

/// Runs `f` on every batch across the available cores. Results come back
/// in batch order.
fn run_batches<T: Send>(total: usize, f: impl Fn(usize, usize, DriveFamily) -> T + Sync) -> Vec<T> {
    let jobs: Vec<_> = batches(total).collect();
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len()).max(1);
    let mut done: Vec<(usize, T)> = thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        let Some(&(start, count, family)) = jobs.get(i) else { break };
                        out.push((i, f(start, count, family)));
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("fuzz worker panicked")).collect()
    });
    done.sort_by_key(|(i, _)| *i);
    done.into_iter().map(|(_, t)| t).collect()
}

fn batch_seed(seed: u64, start: usize) -> u64 {
    seed ^ (start as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn per_lane(count: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..3 * count).map(|l| f(l % 3)).collect()
}

/// Drives the asymmetric model with `opts.signals` random signals bounded by
/// `tau_cM` in norm, starting from rest.
pub fn fuzz_asym(cfg: &AsymSatConfig, opts: &FuzzOptions) -> AsymFuzzReport {
    let t0 = Instant::now();
    let steps = opts.steps();
    let lanes = AsymLanes {
        inv_up: per_lane(BATCH, |a| 1.0 / cfg.tau_max[a]),
        inv_lo: per_lane(BATCH, |a| 1.0 / cfg.tau_min[a]),
        rho: per_lane(BATCH, |a| cfg.rho[a]),
    };
    let mut zmax = Vec3::repeat(f64::NEG_INFINITY);
    let mut zmin = Vec3::repeat(f64::INFINITY);
    let mut drive_norm: f64 = 0.0;
    let results = run_batches(opts.signals, |start, count, family| {
        let mut drive = DriveBatch::new(family, count, start, cfg.tau_c_max, opts.dt, batch_seed(opts.seed, start));
        asym_batch(cfg, &lanes, &mut drive, steps, opts.dt)
    });
    for (hi, lo, dn) in results {
        zmax = zmax.sup(&hi);
        zmin = zmin.inf(&lo);
        drive_norm = drive_norm.max(dn);
    }
    AsymFuzzReport {
        signals: opts.signals,
        steps,
        zeta_max: zmax,
        zeta_min: zmin,
        upper: Vec3::from_fn(|i, _| effective_upper_bound(cfg, i)),
        lower: Vec3::from_fn(|i, _| effective_lower_bound(cfg, i)),
        max_drive_norm: drive_norm,
        drive_bound: cfg.tau_c_max,
        elapsed: t0.elapsed(),
    }
}

struct RateLanes {
    inv_m: Vec<f64>,
    inv_c: Vec<f64>,
    decay: Vec<f64>,
    rho2: Vec<f64>,
}

#[inline(always)]
fn rate_axis(z: f64, c: f64, d: f64, p: (f64, f64, f64, f64), n: u32) -> (f64, f64) {
    let (inv_m, inv_c, decay, rho2) = p;
    (
        (1.0 - pow_even(z * inv_m, n)) * c - decay * z,
        (1.0 - pow_even(c * inv_c, n)) * d - rho2 * c,
    )
}

struct RateExtrema {
    zeta: Vec3,
    tau_c: Vec3,
    zeta_rate: Vec3,
    fd_rate: Vec3,
}

fn rate_batch(cfg: &RateSatConfig, p: &RateLanes, drive: &mut DriveBatch, steps: usize, dt: f64) -> (RateExtrema, f64) {
    let lanes = drive.values.len();
    let n = cfg.n;
    let mut z = vec![0.0; lanes];
    let mut c = vec![0.0; lanes];
    let mut kz = [vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes]];
    let mut kc = [vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes], vec![0.0; lanes]];
    let mut zabs = vec![0.0f64; lanes];
    let mut cabs = vec![0.0f64; lanes];
    let mut rate = vec![0.0f64; lanes];
    let mut fd = vec![0.0f64; lanes];
    let mut drive_norm = drive.max_norm();
    let par = |l: usize| (p.inv_m[l], p.inv_c[l], p.decay[l], p.rho2[l]);
    for step in 0..steps {
        if step > 0 {
            drive.refresh(false);
            if drive.family != DriveFamily::Constant {
                drive_norm = drive_norm.max(drive.max_norm());
            }
        }
        let d = &drive.values[..];
        for l in 0..lanes {
            (kz[0][l], kc[0][l]) = rate_axis(z[l], c[l], d[l], par(l), n);
        }
        for stage in 1..4 {
            let h = if stage == 3 { dt } else { 0.5 * dt };
            for l in 0..lanes {
                (kz[stage][l], kc[stage][l]) = rate_axis(
                    z[l] + h * kz[stage - 1][l],
                    c[l] + h * kc[stage - 1][l],
                    d[l],
                    par(l),
                    n,
                );
            }
        }
        for l in 0..lanes {
            let dz = dt / 6.0 * (kz[0][l] + 2.0 * kz[1][l] + 2.0 * kz[2][l] + kz[3][l]);
            z[l] += dz;
            c[l] += dt / 6.0 * (kc[0][l] + 2.0 * kc[1][l] + 2.0 * kc[2][l] + kc[3][l]);
            let (zd, _) = rate_axis(z[l], c[l], d[l], par(l), n);
            zabs[l] = zabs[l].max(z[l].abs());
            cabs[l] = cabs[l].max(c[l].abs());
            rate[l] = rate[l].max(zd.abs());
            fd[l] = fd[l].max(dz.abs() / dt);
        }
    }
    let mut ex = RateExtrema {
        zeta: Vec3::zeros(),
        tau_c: Vec3::zeros(),
        zeta_rate: Vec3::zeros(),
        fd_rate: Vec3::zeros(),
    };
    for l in 0..lanes {
        let a = l % 3;
        ex.zeta[a] = ex.zeta[a].max(zabs[l]);
        ex.tau_c[a] = ex.tau_c[a].max(cabs[l]);
        ex.zeta_rate[a] = ex.zeta_rate[a].max(rate[l]);
        ex.fd_rate[a] = ex.fd_rate[a].max(fd[l]);
    }
    (ex, drive_norm)
}

fn rate_lanes(cfg: &RateSatConfig, count: usize) -> RateLanes {
    let ceiling = cfg.tau_c_ceiling();
    let decay = cfg.zeta_decay();
    RateLanes {
        inv_m: per_lane(count, |a| 1.0 / cfg.tau_max[a]),
        inv_c: per_lane(count, |a| 1.0 / ceiling[a]),
        decay: per_lane(count, |a| decay[a]),
        rho2: per_lane(count, |a| cfg.rho2[a]),
    }
}

fn rate_report(cfg: &RateSatConfig, signals: usize, steps: usize, ex: RateExtrema, drive_norm: f64, t0: Instant) -> RateFuzzReport {
    RateFuzzReport {
        signals,
        steps,
        zeta_abs_max: ex.zeta,
        tau_c_abs_max: ex.tau_c,
        zeta_rate_abs_max: ex.zeta_rate,
        zeta_fd_rate_abs_max: ex.fd_rate,
        tau_max: cfg.tau_max,
        tau_c_ceiling: cfg.tau_c_ceiling(),
        tau_c_bound: Vec3::from_fn(|i, _| rate_intermediate_bound(cfg, i)),
        tau_rate_max: cfg.tau_rate_max,
        max_drive_norm: drive_norm,
        drive_bound: cfg.tau_d_max,
        elapsed: t0.elapsed(),
    }
}

fn merge(acc: &mut RateExtrema, ex: &RateExtrema) {
    acc.zeta = acc.zeta.sup(&ex.zeta);
    acc.tau_c = acc.tau_c.sup(&ex.tau_c);
    acc.zeta_rate = acc.zeta_rate.sup(&ex.zeta_rate);
    acc.fd_rate = acc.fd_rate.sup(&ex.fd_rate);
}

/// Same protocol as [`fuzz_asym`] for the magnitude and rate model, with
/// drives bounded by `T_M` in norm.
pub fn fuzz_rate(cfg: &RateSatConfig, opts: &FuzzOptions) -> RateFuzzReport {
    let t0 = Instant::now();
    let steps = opts.steps();
    let lanes = rate_lanes(cfg, BATCH);
    let mut acc = RateExtrema {
        zeta: Vec3::zeros(),
        tau_c: Vec3::zeros(),
        zeta_rate: Vec3::zeros(),
        fd_rate: Vec3::zeros(),
    };
    let mut drive_norm: f64 = 0.0;
    let results = run_batches(opts.signals, |start, count, family| {
        let mut drive = DriveBatch::new(family, count, start, cfg.tau_d_max, opts.dt, batch_seed(opts.seed, start));
        rate_batch(cfg, &lanes, &mut drive, steps, opts.dt)
    });
    for (ex, dn) in results {
        merge(&mut acc, &ex);
        drive_norm = drive_norm.max(dn);
    }
    rate_report(cfg, opts.signals, steps, acc, drive_norm, t0)
}

/// Rate model under the constant worst-case drives `+-T_M` along each axis.
pub fn worst_case_rate(cfg: &RateSatConfig, dt: f64, duration: f64) -> RateFuzzReport {
    let t0 = Instant::now();
    let steps = (duration / dt).round() as usize;
    let mut drive = DriveBatch::new(DriveFamily::Constant, 6, 0, cfg.tau_d_max, dt, 0);
    let lanes = rate_lanes(cfg, 6);
    let (ex, dn) = rate_batch(cfg, &lanes, &mut drive, steps, dt);
    rate_report(cfg, 6, steps, ex, dn, t0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(signals: usize) -> FuzzOptions {
        FuzzOptions {
            signals,
            dt: 1e-3,
            duration: 10.0,
            seed: 7,
        }
    }

    #[test]
    fn drive_families_respect_norm_bound() {
        for (i, fam) in DriveFamily::ALL.into_iter().enumerate() {
            let mut d = DriveBatch::new(fam, 32, 64 * i, 100.0, 1e-3, i as u64);
            for _ in 0..20_000 {
                assert!(d.max_norm() <= 100.0 * (1.0 + 1e-12), "{fam:?}");
                d.refresh(false);
            }
        }
    }

    #[test]
    fn first_constant_signals_are_axis_extremes() {
        let d = DriveBatch::new(DriveFamily::Constant, 6, 0, 100.0, 1e-3, 0);
        assert_eq!(&d.values[..3], &[100.0, 0.0, 0.0]);
        assert_eq!(&d.values[3..6], &[-100.0, 0.0, 0.0]);
        assert_eq!(&d.values[15..18], &[0.0, 0.0, -100.0]);
    }

    #[test]
    fn asym_fuzz_small_run_passes_and_approaches_bounds() {
        let cfg = AsymSatConfig::cybership2();
        let r = fuzz_asym(&cfg, &quick(64));
        assert!(r.passed(), "{r:?}");
        for i in 0..3 {
            assert!(r.zeta_max[i] > 0.99 * r.upper[i], "{r:?}");
            assert!(-r.zeta_min[i] > 0.99 * r.lower[i], "{r:?}");
        }
    }

    #[test]
    fn asym_fuzz_detects_violation_with_wrong_bound() {
        let cfg = AsymSatConfig::cybership2();
        let mut r = fuzz_asym(&cfg, &quick(8));
        r.upper[0] *= 0.9;
        assert!(!r.passed());
    }

    #[test]
    fn rate_fuzz_small_run_passes() {
        let cfg = RateSatConfig::cybership2();
        let r = fuzz_rate(&cfg, &quick(64));
        assert!(r.passed(), "{r:?}");
        for i in 0..3 {
            assert!(r.tau_c_abs_max[i] <= r.tau_c_bound[i] + BOUND_TOL, "{r:?}");
        }
    }

    #[test]
    fn worst_case_rate_reaches_intermediate_bound() {
        let cfg = RateSatConfig::cybership2();
        let r = worst_case_rate(&cfg, 1e-3, 100.0);
        assert!(r.passed(), "{r:?}");
        for i in 0..3 {
            assert!(r.tau_c_abs_max[i] > 0.999 * r.tau_c_bound[i]);
            assert!(r.tau_c_abs_max[i] <= r.tau_c_bound[i] + BOUND_TOL);
        }
    }

    #[test]
    fn fuzz_is_deterministic() {
        let cfg = AsymSatConfig::cybership2();
        let a = fuzz_asym(&cfg, &quick(16));
        let b = fuzz_asym(&cfg, &quick(16));
        assert_eq!(a.zeta_max, b.zeta_max);
        assert_eq!(a.zeta_min, b.zeta_min);
    }
}
