//! Time-parameterised reference trajectories with closed-form derivatives.

use serde::{Deserialize, Serialize};

use crate::vessel::rotation_matrix;
use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub eta_d: Vec3,
    pub eta_d_dot: Vec3,
    pub eta_d_ddot: Vec3,
    /// Desired body-frame velocity, `J(psi_d)^T eta_d_dot`.
    pub nu_d: Vec3,
}

/// Reference shapes. The named presets carry the amplitudes and frequencies
/// used in the tracking experiments; every field can be overridden from a
/// scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum Trajectory {
    /// x = ax sin(w t), y = ay (1 - cos(w t)), psi = apsi sin(w t)
    Ellipse { ax: f64, ay: f64, apsi: f64, w: f64 },
    /// x = ax (cos(wx t) - 1), y = ay sin(wy t), psi = apsi sin(wpsi t)
    Figure8 {
        ax: f64,
        wx: f64,
        ay: f64,
        wy: f64,
        apsi: f64,
        wpsi: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TrajectoryPreset {
    Ellipse,
    Figure8,
}

impl TrajectoryPreset {
    pub fn trajectory(self) -> Trajectory {
        match self {
            TrajectoryPreset::Ellipse => Trajectory::ELLIPSE,
            TrajectoryPreset::Figure8 => Trajectory::FIGURE8,
        }
    }
}

impl Trajectory {
    pub const ELLIPSE: Trajectory = Trajectory::Ellipse {
        ax: 4.0,
        ay: 2.5,
        apsi: 0.02,
        w: 0.02,
    };

    pub const FIGURE8: Trajectory = Trajectory::Figure8 {
        ax: 4.0,
        wx: 0.05,
        ay: 2.5,
        wy: 0.1,
        apsi: std::f64::consts::PI,
        wpsi: 0.02,
    };

    pub fn sample(&self, t: f64) -> ReferenceSample {
        let (eta_d, eta_d_dot, eta_d_ddot) = match *self {
            Trajectory::Ellipse { ax, ay, apsi, w } => {
                let (s, c) = (w * t).sin_cos();
                (
                    Vec3::new(ax * s, ay * (1.0 - c), apsi * s),
                    Vec3::new(ax * w * c, ay * w * s, apsi * w * c),
                    Vec3::new(-ax * w * w * s, ay * w * w * c, -apsi * w * w * s),
                )
            }
            Trajectory::Figure8 {
                ax,
                wx,
                ay,
                wy,
                apsi,
                wpsi,
            } => {
                let (sx, cx) = (wx * t).sin_cos();
                let (sy, cy) = (wy * t).sin_cos();
                let (sp, cp) = (wpsi * t).sin_cos();
                (
                    Vec3::new(ax * (cx - 1.0), ay * sy, apsi * sp),
                    Vec3::new(-ax * wx * sx, ay * wy * cy, apsi * wpsi * cp),
                    Vec3::new(-ax * wx * wx * cx, -ay * wy * wy * sy, -apsi * wpsi * wpsi * sp),
                )
            }
        };
        let nu_d = desired_body_velocity(eta_d[2], &eta_d_dot);
        ReferenceSample {
            eta_d,
            eta_d_dot,
            eta_d_ddot,
            nu_d,
        }
    }
}

pub fn ellipse_ref(t: f64) -> ReferenceSample {
    Trajectory::ELLIPSE.sample(t)
}

pub fn figure8_ref(t: f64) -> ReferenceSample {
    Trajectory::FIGURE8.sample(t)
}

/// Rotates the earth-frame reference rate into the desired body frame.
pub fn desired_body_velocity(psi_d: f64, eta_d_dot: &Vec3) -> Vec3 {
    rotation_matrix(psi_d).transpose() * eta_d_dot
}
