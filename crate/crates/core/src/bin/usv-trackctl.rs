use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};
use serde::Serialize;
use serde_json::json;

use usv_trackctl::controller::{ActuatorConfig, Method};
use usv_trackctl::plot::{render_plots, PlotBounds, RunTrace};
use usv_trackctl::reporting::{compute_metrics, invariant_failures, write_csv, RunMetrics};
use usv_trackctl::saturation::{AsymSatConfig, RateSatConfig};
use usv_trackctl::scenario::{expanded_document, set_path, ScenarioConfig};
use usv_trackctl::sim::{run_scenario, SimRun};
use usv_trackctl::verify::{fuzz_asym, fuzz_rate, worst_case_rate, FuzzOptions};
use usv_trackctl::{Error, Result};

#[derive(Parser)]
#[command(name = "usv-trackctl", version, about = "USV trajectory tracking under actuator saturation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its trace, metrics and plots.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario with several methods and overlay the results.
    Compare {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma separated; `proposed` picks the method matching the
        /// scenario's actuator model.
        #[arg(long, value_delimiter = ',', default_value = "proposed,adhoc,unbounded")]
        methods: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fuzz a saturation model and compare extrema with its bounds.
    VerifySaturation {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, default_value_t = 10_000)]
        signals: usize,
        #[arg(long, default_value_t = 100.0)]
        duration: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Re-run a scenario for each value of one parameter.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Dotted path into the scenario document, e.g. `gains.K1.0`.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        /// Writes `sweep.json` and one trace per value when given.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Asym,
    Magrate,
}

#[derive(Serialize)]
struct RunSummary<'a> {
    label: String,
    #[serde(flatten)]
    status: &'a usv_trackctl::sim::RunStatus,
    metrics: &'a RunMetrics,
    diagnostics: &'a usv_trackctl::sim::Diagnostics,
    invariant_failures: Vec<String>,
}

struct Outcome {
    cfg: ScenarioConfig,
    run: SimRun,
    metrics: RunMetrics,
    failures: Vec<String>,
}

impl Outcome {
    fn summary(&self) -> RunSummary<'_> {
        RunSummary {
            label: self.cfg.label(),
            status: &self.run.status,
            metrics: &self.metrics,
            diagnostics: &self.run.diagnostics,
            invariant_failures: self.failures.clone(),
        }
    }
}

fn execute(cfg: ScenarioConfig) -> Result<Outcome> {
    info!("running {} for {} s", cfg.label(), cfg.duration());
    let run = run_scenario(&cfg)?;
    let metrics = compute_metrics(&run.records, &cfg)?;
    let failures = invariant_failures(&run, &metrics);
    Ok(Outcome {
        cfg,
        run,
        metrics,
        failures,
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn print_line(o: &Outcome) {
    let m = &o.metrics;
    println!(
        "{:<28} rmse_pos {:.4} m  rmse_psi {:.4} rad  max|tau| [{:.3}, {:.3}, {:.3}]  violations {}  settle {}",
        o.cfg.label(),
        m.rmse_position,
        m.rmse_heading,
        m.max_abs_tau[0],
        m.max_abs_tau[1],
        m.max_abs_tau[2],
        m.constraint_violation_count,
        m.settle_time_s.map_or("never".into(), |t| format!("{t:.2} s")),
    );
    for w in &o.run.diagnostics.warnings {
        println!("  warning: {w}");
    }
    for f in &o.failures {
        println!("  FAIL: {f}");
    }
}

fn verdict(outcomes: &[&Outcome]) -> ExitCode {
    if outcomes.iter().all(|o| o.failures.is_empty()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn simulate(scenario: &Path, out: &Path) -> Result<ExitCode> {
    let cfg = ScenarioConfig::from_json_file(scenario)?;
    let o = execute(cfg)?;
    create_dir(out)?;
    if o.cfg.output.csv {
        write_csv(&o.run.records, out.join("trace.csv"))?;
    }
    write_json(&out.join("metrics.json"), &o.summary())?;
    if o.cfg.output.plots {
        let bounds = PlotBounds::for_runs(&o.cfg.actuator(), &[o.cfg.method]);
        let label = o.cfg.label();
        render_plots(
            &[RunTrace {
                label: &label,
                records: &o.run.records,
            }],
            &bounds,
            out,
        )?;
    }
    print_line(&o);
    Ok(verdict(&[&o]))
}

fn resolve_methods(names: &[String], actuator: &ActuatorConfig) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for name in names.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let m = match name {
            "proposed" => match actuator {
                ActuatorConfig::Asym(_) => Method::ProposedAsym,
                ActuatorConfig::Magrate(_) => Method::ProposedMagrate,
            },
            other => other.parse()?,
        };
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("no methods given".into()));
    }
    Ok(out)
}

fn compare(scenario: &Path, names: &[String], out: &Path) -> Result<ExitCode> {
    let base = ScenarioConfig::from_json_file(scenario)?;
    let methods = resolve_methods(names, &base.actuator())?;
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = methods
            .iter()
            .map(|&m| {
                let mut cfg = base.with_method(m);
                cfg.name = Some(m.to_string());
                s.spawn(move || execute(cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect::<Result<_>>()
    })?;

    create_dir(out)?;
    let mut summary = BTreeMap::new();
    for o in &outcomes {
        if base.output.csv {
            write_csv(&o.run.records, out.join(format!("trace_{}.csv", o.run.method)))?;
        }
        summary.insert(o.run.method.to_string(), o.summary());
    }
    write_json(&out.join("metrics.json"), &summary)?;
    if base.output.plots {
        let labels: Vec<String> = outcomes.iter().map(|o| o.run.method.to_string()).collect();
        let traces: Vec<RunTrace> = outcomes
            .iter()
            .zip(&labels)
            .map(|(o, l)| RunTrace {
                label: l,
                records: &o.run.records,
            })
            .collect();
        let proposed = outcomes.iter().find(|o| o.run.method.is_proposed());
        let actuator = proposed.map_or(base.actuator(), |o| o.cfg.actuator());
        render_plots(&traces, &PlotBounds::for_runs(&actuator, &methods), out)?;
    }
    for o in &outcomes {
        print_line(o);
    }
    Ok(verdict(&outcomes.iter().collect::<Vec<_>>()))
}

fn fmt3(v: &usv_trackctl::Vec3) -> String {
    format!("[{:.6}, {:.6}, {:.6}]", v[0], v[1], v[2])
}

fn verify_saturation(model: Model, opts: FuzzOptions) -> Result<ExitCode> {
    if opts.signals == 0 || !(opts.dt > 0.0) || !(opts.duration >= opts.dt) {
        return Err(Error::InvalidConfig(
            "need at least one signal, dt > 0 and duration >= dt".into(),
        ));
    }
    let ok = match model {
        Model::Asym => {
            let cfg = AsymSatConfig::cybership2();
            let r = fuzz_asym(&cfg, &opts);
            println!("asym fuzz: {} signals x {} steps in {:.2?}", r.signals, r.steps, r.elapsed);
            println!("  drive norm max  {:.6} (bound {})", r.max_drive_norm, r.drive_bound);
            println!("  zeta max        {}  upper bound  {}", fmt3(&r.zeta_max), fmt3(&r.upper));
            println!("  zeta min        {}  lower bound -{}", fmt3(&r.zeta_min), fmt3(&r.lower));
            r.passed()
        }
        Model::Magrate => {
            let cfg = RateSatConfig::cybership2();
            let mut ok = true;
            let worst = worst_case_rate(&cfg, opts.dt, opts.duration);
            let fuzz = fuzz_rate(&cfg, &opts);
            for (name, r) in [("worst-case drive", &worst), ("random drive", &fuzz)] {
                println!("magrate {name}: {} signals x {} steps in {:.2?}", r.signals, r.steps, r.elapsed);
                println!("  drive norm max  {:.6} (bound {})", r.max_drive_norm, r.drive_bound);
                println!("  |zeta| max      {}  bound {}", fmt3(&r.zeta_abs_max), fmt3(&r.tau_max));
                println!(
                    "  |tau_c| max     {}  bound {}  ceiling {}",
                    fmt3(&r.tau_c_abs_max),
                    fmt3(&r.tau_c_bound),
                    fmt3(&r.tau_c_ceiling)
                );
                println!(
                    "  |zeta_dot| max  {}  bound {}  (finite difference {})",
                    fmt3(&r.zeta_rate_abs_max),
                    fmt3(&r.tau_rate_max),
                    fmt3(&r.zeta_fd_rate_abs_max)
                );
                ok &= r.passed();
            }
            ok
        }
    };
    println!("{}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn sweep(scenario: &Path, param: &str, values: &[f64], out: Option<&Path>) -> Result<ExitCode> {
    let base = ScenarioConfig::from_json_file(scenario)?;
    let doc = expanded_document(&base);
    let mut cfgs = Vec::new();
    for &v in values {
        let mut d = doc.clone();
        set_path(&mut d, param, v)?;
        let mut cfg = ScenarioConfig::from_value(d, scenario)?;
        cfg.name = Some(format!("{param}={v}"));
        cfgs.push(cfg);
    }
    let outcomes: Vec<Outcome> = std::thread::scope(|s| {
        let handles: Vec<_> = cfgs.into_iter().map(|c| s.spawn(move || execute(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect::<Result<_>>()
    })?;
    if let Some(dir) = out {
        create_dir(dir)?;
        let rows: Vec<_> = values
            .iter()
            .zip(&outcomes)
            .map(|(v, o)| json!({ "value": v, "run": o.summary() }))
            .collect();
        write_json(&dir.join("sweep.json"), &json!({ "param": param, "runs": rows }))?;
        if base.output.csv {
            for (i, o) in outcomes.iter().enumerate() {
                write_csv(&o.run.records, dir.join(format!("trace_{i:03}.csv")))?;
            }
        }
    }
    for o in &outcomes {
        print_line(o);
    }
    Ok(verdict(&outcomes.iter().collect::<Vec<_>>()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Simulate { scenario, out } => simulate(scenario, out),
        Command::Compare { scenario, methods, out } => compare(scenario, methods, out),
        Command::VerifySaturation {
            model,
            signals,
            duration,
            dt,
            seed,
        } => verify_saturation(
            *model,
            FuzzOptions {
                signals: *signals,
                dt: *dt,
                duration: *duration,
                seed: *seed,
            },
        ),
        Command::Sweep {
            scenario,
            param,
            values,
            out,
        } => sweep(scenario, param, values, out.as_deref()),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            warn!("{e:?}");
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
