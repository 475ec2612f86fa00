//! Scenario files.
//!
//! A scenario is a JSON document tagged with `"schema": "usv-trackctl/v1"`.
//! Everything except the schema tag, the method and the trajectory has a
//! default taken from the `cybership2` preset, so a minimal file is
//!
//! ```json
//! { "schema": "usv-trackctl/v1", "method": "proposed-asym", "trajectory": "ellipse" }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::controller::{ActuatorConfig, GainSet, Method};
use crate::saturation::{AsymSatConfig, RateSatConfig};
use crate::sim::DisturbanceSpec;
use crate::trajectory::{Trajectory, TrajectoryPreset};
use crate::vessel::{Vessel, VesselParams};
use crate::{Error, Result, Vec3};

pub const SCHEMA: &str = "usv-trackctl/v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VesselSpec {
    Preset(String),
    Params(Box<VesselParams>),
}

impl Default for VesselSpec {
    fn default() -> Self {
        VesselSpec::Preset("cybership2".into())
    }
}

impl VesselSpec {
    pub fn params(&self) -> Result<VesselParams> {
        match self {
            VesselSpec::Preset(name) if name == "cybership2" => Ok(VesselParams::cybership2()),
            VesselSpec::Preset(name) => Err(Error::InvalidConfig(format!("unknown vessel preset {name:?}"))),
            VesselSpec::Params(p) => Ok(**p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrajectorySpec {
    Preset(TrajectoryPreset),
    Custom(Trajectory),
}

impl TrajectorySpec {
    pub fn trajectory(&self) -> Trajectory {
        match *self {
            TrajectorySpec::Preset(p) => p.trajectory(),
            TrajectorySpec::Custom(t) => t,
        }
    }

    /// Default run length: 400 s for the ellipse, 300 s for the figure-8.
    pub fn default_duration(&self) -> f64 {
        match self.trajectory() {
            Trajectory::Ellipse { .. } => 400.0,
            Trajectory::Figure8 { .. } => 300.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    pub eta: Vec3,
    #[serde(default = "Vec3::zeros")]
    pub nu: Vec3,
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            eta: Vec3::zeros(),
            nu: Vec3::zeros(),
        }
    }
}

/// Named starting poses of the tracking experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StartPoint {
    P1,
    P2,
    P3,
}

impl StartPoint {
    pub const ALL: [StartPoint; 3] = [StartPoint::P1, StartPoint::P2, StartPoint::P3];

    /// Starting pose; the figure-8 runs of the asymmetric stack use a closer
    /// P2.
    pub fn eta(self, trajectory: TrajectoryPreset, method: Method) -> Vec3 {
        let (x, y) = match self {
            StartPoint::P1 => (-1.0, 0.0),
            StartPoint::P2 if trajectory == TrajectoryPreset::Figure8 && method != Method::ProposedMagrate => (0.5, -0.5),
            StartPoint::P2 => (1.0, -1.0),
            StartPoint::P3 => (-1.0, 1.0),
        };
        Vec3::new(x, y, 0.01)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StartPoint::P1 => "p1",
            StartPoint::P2 => "p2",
            StartPoint::P3 => "p3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverConfig {
    #[serde(rename = "K0")]
    pub k0: Vec3,
}

impl Default for ObserverConfig {
    fn default() -> Self {
        Self { k0: Vec3::repeat(10.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub csv: bool,
    pub plots: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        Self { csv: true, plots: true }
    }
}

fn default_dt() -> f64 {
    0.01
}

fn default_substeps() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default)]
    pub vessel: VesselSpec,
    /// Adds the cubic surge damping term to D(nu).
    #[serde(default)]
    pub cubic_surge_damping: bool,
    pub method: Method,
    pub trajectory: TrajectorySpec,
    #[serde(default)]
    pub initial: InitialState,
    /// Defaults to the gain table of the actuator model in use.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainSet>,
    #[serde(default)]
    pub observer: ObserverConfig,
    /// Defaults to the magnitude and rate preset for `proposed-magrate`,
    /// the asymmetric preset otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actuator: Option<ActuatorConfig>,
    #[serde(default)]
    pub disturbance: DisturbanceSpec,
    /// Control and integration step (s).
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// RK4 substeps per control step.
    #[serde(default = "default_substeps")]
    pub substeps: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    #[serde(default)]
    pub output: OutputOptions,
}

impl ScenarioConfig {
    /// Fully populated scenario for a preset trajectory and start point.
    pub fn preset(method: Method, trajectory: TrajectoryPreset, start: StartPoint) -> Self {
        let mut cfg = Self {
            schema: SCHEMA.into(),
            name: None,
            vessel: VesselSpec::default(),
            cubic_surge_damping: false,
            method,
            trajectory: TrajectorySpec::Preset(trajectory),
            initial: InitialState {
                eta: start.eta(trajectory, method),
                nu: Vec3::zeros(),
            },
            gains: None,
            observer: ObserverConfig::default(),
            actuator: None,
            disturbance: DisturbanceSpec::default(),
            dt: default_dt(),
            substeps: 1,
            duration: None,
            output: OutputOptions::default(),
        };
        let label = match trajectory {
            TrajectoryPreset::Ellipse => "ellipse",
            TrajectoryPreset::Figure8 => "figure8",
        };
        cfg.name = Some(format!("{label}-{}-{method}", start.as_str()));
        cfg.gains = Some(cfg.gains());
        cfg.actuator = Some(cfg.actuator());
        cfg.duration = Some(cfg.duration());
        cfg
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Json {
            path: "<string>".into(),
            source: e,
        })?;
        Self::from_value(v, Path::new("<string>"))
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.into(),
            source: e,
        })?;
        Self::from_value(v, path)
    }

    pub fn from_value(v: Value, origin: &Path) -> Result<Self> {
        match v.get("schema").and_then(Value::as_str) {
            Some(SCHEMA) => {}
            other => {
                return Err(Error::Schema {
                    found: other.unwrap_or("<missing>").to_string(),
                    expected: SCHEMA,
                })
            }
        }
        let cfg: Self = serde_json::from_value(v).map_err(|e| Error::Json {
            path: origin.into(),
            source: e,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("scenario serialises")
    }

    pub fn gains(&self) -> GainSet {
        self.gains.unwrap_or_else(|| match self.actuator() {
            ActuatorConfig::Asym(_) => GainSet::asym_table(),
            ActuatorConfig::Magrate(_) => GainSet::magrate_table(),
        })
    }

    pub fn actuator(&self) -> ActuatorConfig {
        self.actuator.unwrap_or(match self.method {
            Method::ProposedMagrate => ActuatorConfig::Magrate(RateSatConfig::cybership2()),
            _ => ActuatorConfig::Asym(AsymSatConfig::cybership2()),
        })
    }

    pub fn duration(&self) -> f64 {
        self.duration.unwrap_or_else(|| self.trajectory.default_duration())
    }

    pub fn vessel(&self) -> Result<Vessel> {
        Vessel::new(self.vessel.params()?, self.cubic_surge_damping)
    }

    pub fn steps(&self) -> usize {
        (self.duration() / self.dt).round() as usize
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.method.to_string())
    }

    /// Same scenario run with another method. A proposed method switches
    /// the actuator model (and, if unset, the gains) to its own preset when
    /// the configured one does not fit.
    pub fn with_method(&self, method: Method) -> Self {
        let mut c = self.clone();
        c.method = method;
        let fits = matches!(
            (method, self.actuator()),
            (Method::ProposedAsym, ActuatorConfig::Asym(_)) | (Method::ProposedMagrate, ActuatorConfig::Magrate(_))
        ) || !method.is_proposed();
        if !fits {
            c.actuator = None;
            c.gains = None;
        }
        if let Some(n) = &self.name {
            c.name = Some(format!("{n}/{method}"));
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::Schema {
                found: self.schema.clone(),
                expected: SCHEMA,
            });
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        let d = self.duration();
        if !d.is_finite() || d < self.dt {
            return Err(Error::InvalidConfig(format!(
                "duration {d} must be at least one step (dt = {})",
                self.dt
            )));
        }
        if self.substeps == 0 {
            return Err(Error::InvalidConfig("substeps must be at least 1".into()));
        }
        if self.initial.eta.iter().chain(self.initial.nu.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidConfig("initial state must be finite".into()));
        }
        self.vessel.params()?.validate()?;
        self.vessel()?;
        self.gains().validate()?;
        let act = self.actuator();
        act.validate()?;
        match (self.method, act) {
            (Method::ProposedAsym, ActuatorConfig::Magrate(_)) | (Method::ProposedMagrate, ActuatorConfig::Asym(_)) => {
                return Err(Error::InvalidConfig(format!(
                    "method {} needs the matching actuator model",
                    self.method
                )))
            }
            _ => {}
        }
        if self.observer.k0.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "observer K0 must be positive, got {:?}",
                self.observer.k0
            )));
        }
        self.disturbance.validate()
    }
}

/// Sets the value at a dotted path (`gains.K1.0`, `disturbance.offset`,
/// `dt`) inside a scenario document. Array indices are plain integers. A
/// scalar written over a numeric array is broadcast to every element.
/// Missing object keys are created.
pub fn set_path(doc: &mut Value, path: &str, value: f64) -> Result<()> {
    let bad = |msg: &str| Error::InvalidConfig(format!("parameter path {path:?}: {msg}"));
    let mut cur = doc;
    let parts: Vec<&str> = path.split('.').filter(|p| !p.is_empty()).collect();
    if parts.is_empty() {
        return Err(bad("empty"));
    }
    for (depth, key) in parts.iter().enumerate() {
        let last = depth + 1 == parts.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    let slot = map.entry(key.to_string()).or_insert(Value::Null);
                    return assign(slot, value);
                }
                map.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| bad("expected an array index"))?;
                let len = items.len();
                let slot = items.get_mut(i).ok_or_else(|| bad(&format!("index {i} out of range ({len})")))?;
                if last {
                    return assign(slot, value);
                }
                slot
            }
            _ => return Err(bad(&format!("cannot descend into {key:?}"))),
        };
    }
    unreachable!()
}

fn assign(slot: &mut Value, value: f64) -> Result<()> {
    let num = serde_json::Number::from_f64(value)
        .ok_or_else(|| Error::InvalidConfig(format!("cannot store non-finite value {value}")))?;
    match slot {
        Value::Array(items) if items.iter().all(Value::is_number) => {
            for it in items.iter_mut() {
                *it = Value::Number(num.clone());
            }
        }
        _ => *slot = Value::Number(num),
    }
    Ok(())
}

/// Fills every defaulted field of a scenario document so sweep paths can
/// address them.
pub fn expanded_document(cfg: &ScenarioConfig) -> Value {
    let mut c = cfg.clone();
    c.gains = Some(c.gains());
    c.actuator = Some(c.actuator());
    c.duration = Some(c.duration());
    let mut v = c.to_value();
    if let Some(vs) = v.get_mut("vessel") {
        if vs.is_string() {
            *vs = serde_json::to_value(cfg.vessel.params().unwrap_or_else(|_| VesselParams::cybership2()))
                .expect("params serialise");
        }
    }
    v
}
