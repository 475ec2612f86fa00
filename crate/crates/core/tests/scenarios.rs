use std::path::Path;

use usv_trackctl::controller::Method;
use usv_trackctl::scenario::{ScenarioConfig, StartPoint};
use usv_trackctl::trajectory::TrajectoryPreset;

#[test]
fn shipped_scenarios_match_presets() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut n = 0;
    for (traj, method) in [
        (TrajectoryPreset::Ellipse, Method::ProposedAsym),
        (TrajectoryPreset::Figure8, Method::ProposedAsym),
        (TrajectoryPreset::Figure8, Method::ProposedMagrate),
    ] {
        for p in StartPoint::ALL {
            let model = if method == Method::ProposedMagrate { "magrate" } else { "asym" };
            let tname = if traj == TrajectoryPreset::Ellipse { "ellipse" } else { "figure8" };
            let file = dir.join(format!("{tname}-{}-{model}.json", p.as_str()));
            let cfg = ScenarioConfig::from_json_file(&file).unwrap();
            let mut want = ScenarioConfig::preset(method, traj, p);
            want.name = cfg.name.clone();
            assert_eq!(cfg.initial, want.initial, "{}", file.display());
            assert_eq!(cfg.method, want.method);
            assert_eq!(cfg.gains(), want.gains());
            assert_eq!(cfg.actuator(), want.actuator());
            assert_eq!(cfg.trajectory.trajectory(), want.trajectory.trajectory());
            assert_eq!(cfg.duration(), want.duration());
            n += 1;
        }
    }
    assert_eq!(n, std::fs::read_dir(&dir).unwrap().count());
}
