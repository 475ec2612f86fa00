use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use usv_trackctl::reporting::{read_csv, CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_usv-trackctl"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

fn short_copy(dir: &Path, name: &str, duration: f64) -> PathBuf {
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(scenario(name)).unwrap()).unwrap();
    doc["duration"] = duration.into();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, doc.to_string()).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("spawn");
    eprintln!("{}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn simulate_writes_trace_metrics_and_plots() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_copy(tmp.path(), "ellipse-p1-asym", 5.0);
    let out = tmp.path().join("run");
    let o = run(bin().args(["simulate", "--scenario"]).arg(&cfg).arg("--out").arg(&out));
    assert!(o.status.success());

    let recs = read_csv(out.join("trace.csv")).unwrap();
    assert_eq!(recs.len(), 501);
    let header = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(header.lines().next().unwrap(), CSV_HEADER.join(","));

    let m: Value = serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert_eq!(m["status"], "completed");
    assert_eq!(m["metrics"]["constraint_violation_count"], 0);
    assert_eq!(m["invariant_failures"].as_array().unwrap().len(), 0);
    for f in usv_trackctl::plot::PLOT_FILES {
        assert!(out.join(f).is_file(), "{f}");
    }
}

#[test]
fn compare_resolves_proposed_and_reports_each_method() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_copy(tmp.path(), "figure8-p1-magrate", 5.0);
    let out = tmp.path().join("cmp");
    let o = run(bin()
        .args(["compare", "--scenario"])
        .arg(&cfg)
        .args(["--methods", "proposed,adhoc,unbounded", "--out"])
        .arg(&out));
    assert!(o.status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    let keys: Vec<&String> = m.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["adhoc", "proposed-magrate", "unbounded"]);
    for k in keys {
        assert!(out.join(format!("trace_{k}.csv")).is_file());
    }
}

#[test]
fn unbounded_violations_do_not_fail_the_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_copy(tmp.path(), "figure8-p1-asym", 3.0);
    let o = run(bin()
        .args(["compare", "--scenario"])
        .arg(&cfg)
        .args(["--methods", "unbounded", "--out"])
        .arg(tmp.path().join("u")));
    assert!(o.status.success());
    let m: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("u/metrics.json")).unwrap()).unwrap();
    assert!(m["unbounded"]["metrics"]["constraint_violation_count"].as_u64().unwrap() > 0);
}

#[test]
fn sweep_applies_each_value() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = short_copy(tmp.path(), "ellipse-p1-asym", 2.0);
    let out = tmp.path().join("sweep");
    let o = run(bin()
        .args(["sweep", "--scenario"])
        .arg(&cfg)
        .args(["--param", "gains.K1.0", "--values", "0.5,2", "--out"])
        .arg(&out));
    assert!(o.status.success());
    let s: Value = serde_json::from_str(&std::fs::read_to_string(out.join("sweep.json")).unwrap()).unwrap();
    let runs = s["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[0]["value"], 0.5);
    assert_eq!(runs[1]["run"]["label"], "gains.K1.0=2");
    let a = &runs[0]["run"]["metrics"]["max_abs_tau"][0];
    let b = &runs[1]["run"]["metrics"]["max_abs_tau"][0];
    assert_ne!(a, b);
}

#[test]
fn verify_saturation_passes_on_short_runs() {
    for model in ["asym", "magrate"] {
        let o = run(bin().args([
            "verify-saturation",
            "--model",
            model,
            "--signals",
            "128",
            "--duration",
            "5",
        ]));
        assert!(o.status.success(), "{model}");
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.trim_end().ends_with("PASS"), "{text}");
    }
}

#[test]
fn bad_input_exits_with_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema": "usv-trackctl/v0", "method": "adhoc", "trajectory": "ellipse"}"#).unwrap();
    let o = run(bin().args(["simulate", "--scenario"]).arg(&bad).arg("--out").arg(tmp.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));

    let o = run(bin()
        .args(["sweep", "--scenario"])
        .arg(scenario("ellipse-p1-asym"))
        .args(["--param", "gains.K9.7", "--values", "1"]));
    assert_eq!(o.status.code(), Some(2));
}
