//! Trajectory tracking control for a fully actuated 3-DOF surface vessel with
//! actuator constraints.
//!
//! The crate bundles the vessel model (kinematics, rigid-body and hydrodynamic
//! dynamics), a nonlinear disturbance observer, two smooth actuator saturation
//! models (asymmetric magnitude, and nested magnitude + rate), the backstepping
//! control laws designed around them, plus the simulation engine and reporting
//! used to run tracking experiments from scenario files.
//!
//! Vectors are `nalgebra` 3-vectors throughout. Diagonal gain and bound
//! matrices are stored as the vector of their diagonal entries.

pub mod controller;
pub mod error;
pub mod observer;
pub mod plot;
pub mod reporting;
pub mod saturation;
pub mod scenario;
pub mod sim;
pub mod trajectory;
pub mod verify;
pub mod vessel;

pub use error::{Error, Result};

/// Body- or earth-frame 3-vector `[x, y, psi]` / `[u, v, r]` / `[X, Y, N]`.
pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;
