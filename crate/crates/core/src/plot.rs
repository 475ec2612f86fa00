//! Static SVG line plots of simulation traces.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::controller::{ActuatorConfig, Method};
use crate::sim::SimRecord;
use crate::{Error, Result, Vec3};

pub const PLOT_FILES: [&str; 7] = [
    "xy_track.svg",
    "control_inputs.svg",
    "pose.svg",
    "tracking_errors.svg",
    "body_rates.svg",
    "disturbance.svg",
    "input_rate.svg",
];

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const REF_COLOR: &str = "#222222";
const BOUND_COLOR: &str = "#7f7f7f";
/// Points kept per series after min/max decimation.
const MAX_POINTS: usize = 1500;

/// Horizontal limit lines drawn on the input plots.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlotBounds {
    pub tau_upper: Option<Vec3>,
    /// Lower-bound magnitudes; lines are drawn at their negatives.
    pub tau_lower: Option<Vec3>,
    pub rate: Option<Vec3>,
}

impl PlotBounds {
    /// Limits of `actuator`, or none when every run is unbounded.
    pub fn for_runs(actuator: &ActuatorConfig, methods: &[Method]) -> Self {
        if methods.iter().all(|&m| m == Method::Unbounded) {
            return Self::default();
        }
        let (up, lo) = actuator.magnitude_bounds();
        Self {
            tau_upper: Some(up),
            tau_lower: Some(lo),
            rate: actuator.rate_bounds(),
        }
    }
}

/// One labelled trace to draw.
#[derive(Debug, Clone, Copy)]
pub struct RunTrace<'a> {
    pub label: &'a str,
    pub records: &'a [SimRecord],
}

struct Series {
    label: String,
    color: &'static str,
    dashed: bool,
    points: Vec<(f64, f64)>,
}

struct HLine {
    y: f64,
    label: String,
}

struct Panel {
    ylabel: String,
    xlabel: String,
    series: Vec<Series>,
    hlines: Vec<HLine>,
    equal_aspect: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Keeps the first and last point and the extremes of each bucket, in time
/// order.
fn decimate(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points;
    }
    let buckets = MAX_POINTS / 2;
    let size = points.len().div_ceil(buckets);
    let mut out = Vec::with_capacity(2 * buckets + 2);
    for chunk in points.chunks(size) {
        let (mut lo, mut hi) = (0, 0);
        for (i, p) in chunk.iter().enumerate() {
            if p.1 < chunk[lo].1 {
                lo = i;
            }
            if p.1 > chunk[hi].1 {
                hi = i;
            }
        }
        let (a, b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        out.push(chunk[a]);
        if b != a {
            out.push(chunk[b]);
        }
    }
    if out.last() != points.last() {
        out.push(*points.last().unwrap());
    }
    out
}

fn nice_step(range: f64, target: usize) -> f64 {
    let raw = range / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.0 {
        2.0
    } else if norm < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 * (1.0 + hi.abs()) {
        let pad = 0.5 * (1.0 + hi.abs()) * 1e-3;
        return (lo - pad.max(1e-9), hi + pad.max(1e-9));
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn render_panel(svg: &mut String, p: &Panel, x0: f64, y0: f64, w: f64, h: f64) {
    let (mut xlo, mut xhi) = extent(p.series.iter().flat_map(|s| s.points.iter().map(|q| q.0)));
    let (mut ylo, mut yhi) = extent(
        p.series
            .iter()
            .flat_map(|s| s.points.iter().map(|q| q.1))
            .chain(p.hlines.iter().map(|l| l.y)),
    );
    if p.equal_aspect {
        let (cx, cy) = (0.5 * (xlo + xhi), 0.5 * (ylo + yhi));
        let scale = ((xhi - xlo) / w).max((yhi - ylo) / h);
        (xlo, xhi) = (cx - 0.5 * scale * w, cx + 0.5 * scale * w);
        (ylo, yhi) = (cy - 0.5 * scale * h, cy + 0.5 * scale * h);
    }
    let sx = |x: f64| x0 + (x - xlo) / (xhi - xlo) * w;
    let sy = |y: f64| y0 + h - (y - ylo) / (yhi - ylo) * h;

    let _ = writeln!(
        svg,
        r##"<rect x="{x0:.1}" y="{y0:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#000" stroke-width="1"/>"##
    );
    for t in ticks(xlo, xhi) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{y0:.1}" x2="{x:.1}" y2="{:.1}" stroke="#e5e5e5"/><text x="{x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"##,
            y0 + h,
            y0 + h + 14.0,
            fmt_tick(t)
        );
    }
    for t in ticks(ylo, yhi) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e5e5e5"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"##,
            x0 + w,
            x0 - 5.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    for l in &p.hlines {
        let y = sy(l.y);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{BOUND_COLOR}" stroke-width="1.2" stroke-dasharray="2,3"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end" fill="{BOUND_COLOR}">{}</text>"##,
            x0 + w,
            x0 + w - 4.0,
            y - 3.0,
            escape(&l.label)
        );
    }
    let _ = writeln!(
        svg,
        r#"<clipPath id="c{x0:.0}_{y0:.0}"><rect x="{x0:.1}" y="{y0:.1}" width="{w:.1}" height="{h:.1}"/></clipPath>"#
    );
    for s in &p.series {
        if s.points.is_empty() {
            continue;
        }
        let mut d = String::with_capacity(s.points.len() * 16);
        for (i, (x, y)) in s.points.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, sx(*x), sy(*y));
        }
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.4"{dash} clip-path="url(#c{x0:.0}_{y0:.0})"/>"#,
            s.color
        );
    }
    // legend
    let mut ly = y0 + 14.0;
    for s in p.series.iter().filter(|s| !s.label.is_empty()) {
        let lx = x0 + 8.0;
        let dash = if s.dashed { r#" stroke-dasharray="6,4""# } else { "" };
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="2"{dash}/><text x="{:.1}" y="{ly:.1}" font-size="11">{}</text>"#,
            ly - 4.0,
            lx + 22.0,
            ly - 4.0,
            s.color,
            lx + 27.0,
            escape(&s.label)
        );
        ly += 14.0;
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        x0 + 0.5 * w,
        y0 + h + 30.0,
        escape(&p.xlabel)
    );
    let (tx, ty) = (x0 - 48.0, y0 + 0.5 * h);
    let _ = writeln!(
        svg,
        r#"<text x="{tx:.1}" y="{ty:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 {tx:.1} {ty:.1})">{}</text>"#,
        escape(&p.ylabel)
    );
}

fn render_figure(title: &str, panels: &[Panel], panel_h: f64) -> String {
    let (w, left, right, top, gap) = (760.0, 70.0, 20.0, 40.0, 50.0);
    let height = top + panels.len() as f64 * (panel_h + gap) + 10.0;
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{height}" viewBox="0 0 {w} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="22" font-size="15" text-anchor="middle">{}</text>"#,
        0.5 * w,
        escape(title)
    );
    for (i, p) in panels.iter().enumerate() {
        let y0 = top + i as f64 * (panel_h + gap);
        render_panel(&mut svg, p, left, y0, w - left - right, panel_h);
    }
    svg.push_str("</svg>\n");
    svg
}

fn series(label: impl Into<String>, color: &'static str, dashed: bool, points: Vec<(f64, f64)>) -> Series {
    Series {
        label: label.into(),
        color,
        dashed,
        points: decimate(points),
    }
}

fn time_series(r: &[SimRecord], f: impl Fn(&SimRecord) -> f64) -> Vec<(f64, f64)> {
    r.iter().map(|x| (x.t, f(x))).collect()
}

fn axis_panels(
    runs: &[RunTrace<'_>],
    ylabels: [&str; 3],
    value: impl Fn(&SimRecord, usize) -> f64,
    reference: Option<&dyn Fn(&SimRecord, usize) -> f64>,
    hlines: impl Fn(usize) -> Vec<HLine>,
) -> Vec<Panel> {
    (0..3)
        .map(|i| {
            let mut s: Vec<Series> = runs
                .iter()
                .enumerate()
                .map(|(k, r)| series(r.label, PALETTE[k % PALETTE.len()], false, time_series(r.records, |x| value(x, i))))
                .collect();
            if let (Some(f), Some(first)) = (reference, runs.first()) {
                s.push(series("reference", REF_COLOR, true, time_series(first.records, |x| f(x, i))));
            }
            Panel {
                ylabel: ylabels[i].to_string(),
                xlabel: "t (s)".into(),
                series: s,
                hlines: hlines(i),
                equal_aspect: false,
            }
        })
        .collect()
}

fn write_file(dir: &Path, name: &str, body: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the seven plot files into `out_dir`, overlaying all runs.
pub fn render_plots(runs: &[RunTrace<'_>], bounds: &PlotBounds, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    if runs.is_empty() || runs.iter().any(|r| r.records.is_empty()) {
        return Err(Error::EmptyRecords);
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();

    let mut xy: Vec<Series> = runs
        .iter()
        .enumerate()
        .map(|(k, r)| {
            series(
                r.label,
                PALETTE[k % PALETTE.len()],
                false,
                r.records.iter().map(|x| (x.eta[1], x.eta[0])).collect(),
            )
        })
        .collect();
    xy.push(series(
        "reference",
        REF_COLOR,
        true,
        runs[0].records.iter().map(|x| (x.eta_d[1], x.eta_d[0])).collect(),
    ));
    let panel = Panel {
        ylabel: "x north (m)".into(),
        xlabel: "y east (m)".into(),
        series: xy,
        hlines: Vec::new(),
        equal_aspect: true,
    };
    files.push(write_file(dir, PLOT_FILES[0], &render_figure("Track in the horizontal plane", &[panel], 460.0))?);

    let tau_lines = |i: usize| {
        let mut v = Vec::new();
        if let Some(u) = bounds.tau_upper {
            v.push(HLine {
                y: u[i],
                label: format!("upper {}", fmt_tick(u[i])),
            });
        }
        if let Some(l) = bounds.tau_lower {
            v.push(HLine {
                y: -l[i],
                label: format!("lower {}", fmt_tick(-l[i])),
            });
        }
        v
    };
    let p = axis_panels(runs, ["tau1 (N)", "tau2 (N)", "tau3 (N m)"], |x, i| x.tau[i], None, tau_lines);
    files.push(write_file(dir, PLOT_FILES[1], &render_figure("Control inputs", &p, 170.0))?);

    let reference = |x: &SimRecord, i: usize| x.eta_d[i];
    let p = axis_panels(runs, ["x (m)", "y (m)", "psi (rad)"], |x, i| x.eta[i], Some(&reference), |_| Vec::new());
    files.push(write_file(dir, PLOT_FILES[2], &render_figure("Pose and reference", &p, 170.0))?);

    let p = axis_panels(
        runs,
        ["x error (m)", "y error (m)", "heading error (rad)"],
        |x, i| x.z1[i],
        None,
        |_| Vec::new(),
    );
    files.push(write_file(dir, PLOT_FILES[3], &render_figure("Tracking errors", &p, 170.0))?);

    let p = axis_panels(runs, ["u (m/s)", "v (m/s)", "r (rad/s)"], |x, i| x.nu[i], None, |_| Vec::new());
    files.push(write_file(dir, PLOT_FILES[4], &render_figure("Body-frame velocities", &p, 170.0))?);

    let truth = |x: &SimRecord, i: usize| x.b[i];
    let p = axis_panels(
        runs,
        ["b1 (N)", "b2 (N)", "b3 (N m)"],
        |x, i| x.b_hat[i],
        Some(&truth),
        |_| Vec::new(),
    );
    let p: Vec<Panel> = p
        .into_iter()
        .map(|mut panel| {
            for s in &mut panel.series {
                if s.label == "reference" {
                    s.label = "true".into();
                } else {
                    s.label = format!("{} estimate", s.label);
                }
            }
            panel
        })
        .collect();
    files.push(write_file(dir, PLOT_FILES[5], &render_figure("Disturbance and estimate", &p, 170.0))?);

    let rate_lines = |i: usize| match bounds.rate {
        Some(r) => vec![
            HLine {
                y: r[i],
                label: format!("+{}", fmt_tick(r[i])),
            },
            HLine {
                y: -r[i],
                label: format!("-{}", fmt_tick(r[i])),
            },
        ],
        None => Vec::new(),
    };
    let p = axis_panels(
        runs,
        ["dtau1/dt (N/s)", "dtau2/dt (N/s)", "dtau3/dt (N m/s)"],
        |x, i| x.tau_rate[i],
        None,
        rate_lines,
    );
    files.push(write_file(dir, PLOT_FILES[6], &render_figure("Input rates", &p, 170.0))?);

    Ok(files)
}
