//! 3-DOF surface vessel model.
//!
//! eta_dot = J(psi) nu
//! M nu_dot = tau - C(nu) nu - D(nu) nu + b
//!
//! with eta = [x, y, psi] in the earth frame (x north, y east) and
//! nu = [u, v, r] in the body frame. Hydrodynamic derivatives follow the SNAME
//! naming and sign convention, so damping coefficients are negative numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Mat3, Result, Vec3};

/// Largest accepted condition number of the mass matrix.
pub const MAX_MASS_CONDITION: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VesselParams {
    /// Mass (kg).
    pub m: f64,
    /// Yaw moment of inertia (kg m^2).
    #[serde(rename = "I_z")]
    pub i_z: f64,
    /// Longitudinal distance from the body origin to the centre of gravity (m).
    pub x_g: f64,

    #[serde(rename = "X_udot")]
    pub x_udot: f64,
    #[serde(rename = "Y_vdot")]
    pub y_vdot: f64,
    #[serde(rename = "Y_rdot")]
    pub y_rdot: f64,
    #[serde(rename = "N_vdot")]
    pub n_vdot: f64,
    #[serde(rename = "N_rdot")]
    pub n_rdot: f64,

    #[serde(rename = "X_u")]
    pub x_u: f64,
    #[serde(rename = "X_|u|u")]
    pub x_absu_u: f64,
    #[serde(rename = "X_uuu")]
    pub x_uuu: f64,

    #[serde(rename = "Y_v")]
    pub y_v: f64,
    #[serde(rename = "Y_|v|v")]
    pub y_absv_v: f64,
    #[serde(rename = "Y_|r|v")]
    pub y_absr_v: f64,
    #[serde(rename = "Y_r")]
    pub y_r: f64,
    #[serde(rename = "Y_|v|r")]
    pub y_absv_r: f64,
    #[serde(rename = "Y_|r|r")]
    pub y_absr_r: f64,

    #[serde(rename = "N_v")]
    pub n_v: f64,
    #[serde(rename = "N_|v|v")]
    pub n_absv_v: f64,
    #[serde(rename = "N_|r|v")]
    pub n_absr_v: f64,
    #[serde(rename = "N_r")]
    pub n_r: f64,
    #[serde(rename = "N_|v|r")]
    pub n_absv_r: f64,
    #[serde(rename = "N_|r|r")]
    pub n_absr_r: f64,
}

impl VesselParams {
    /// CyberShip II model ship (1:70 scale supply vessel).
    pub fn cybership2() -> Self {
        Self {
            m: 23.8,
            i_z: 1.76,
            x_g: 0.046,
            x_udot: -2.0,
            y_vdot: -10.0,
            y_rdot: -0.0,
            n_vdot: -0.0,
            n_rdot: -0.0,
            x_u: -0.72253,
            x_absu_u: -1.32742,
            x_uuu: -5.86643,
            y_v: -2.0,
            y_absv_v: -36.47287,
            y_absr_v: -0.805,
            y_r: -7.250,
            y_absv_r: -0.845,
            y_absr_r: -3.450,
            n_v: 0.03130,
            n_absv_v: 3.95645,
            n_absr_v: 0.130,
            n_r: -1.900,
            n_absv_r: 0.080,
            n_absr_r: -0.750,
        }
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    fn fields(&self) -> [f64; 23] {
        [
            self.m,
            self.i_z,
            self.x_g,
            self.x_udot,
            self.y_vdot,
            self.y_rdot,
            self.n_vdot,
            self.n_rdot,
            self.x_u,
            self.x_absu_u,
            self.x_uuu,
            self.y_v,
            self.y_absv_v,
            self.y_absr_v,
            self.y_r,
            self.y_absv_r,
            self.y_absr_r,
            self.n_v,
            self.n_absv_v,
            self.n_absr_v,
            self.n_r,
            self.n_absv_r,
            self.n_absr_r,
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.fields().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite coefficient".into()));
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidParams(format!("mass must be positive, got {}", self.m)));
        }
        if self.i_z <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "yaw inertia must be positive, got {}",
                self.i_z
            )));
        }
        Ok(())
    }

    /// Rigid-body plus added mass matrix. Rejects matrices that are not
    /// positive definite or are too badly conditioned to invert.
    pub fn mass_matrix(&self) -> Result<Mat3> {
        self.validate()?;
        let m = self.raw_mass_matrix();
        check_positive_definite(&m)?;
        let inv = invert3(&m).ok_or_else(|| Error::InvalidParams("singular mass matrix".into()))?;
        let cond = norm1(&m) * norm1(&inv);
        if !(cond <= MAX_MASS_CONDITION) {
            return Err(Error::InvalidParams(format!(
                "mass matrix condition number {cond:.3e} exceeds {MAX_MASS_CONDITION:e}"
            )));
        }
        Ok(m)
    }

    fn raw_mass_matrix(&self) -> Mat3 {
        let m11 = self.m - self.x_udot;
        let m22 = self.m - self.y_vdot;
        let m33 = self.i_z - self.n_rdot;
        let m23 = self.m * self.x_g - self.y_rdot;
        let m32 = self.m * self.x_g - self.n_vdot;
        Mat3::new(m11, 0.0, 0.0, 0.0, m22, m23, 0.0, m32, m33)
    }

    /// Coriolis and centripetal matrix including added-mass terms. Skew
    /// symmetric for every `nu`.
    pub fn coriolis_matrix(&self, nu: &Vec3) -> Mat3 {
        let m = self.raw_mass_matrix();
        coriolis_from_mass(&m, nu)
    }

    /// Hydrodynamic damping matrix. `cubic_surge` adds the `-X_uuu u^2` term to
    /// the surge entry.
    pub fn damping_matrix(&self, nu: &Vec3, cubic_surge: bool) -> Mat3 {
        let (u, v, r) = (nu[0], nu[1], nu[2]);
        let (au, av, ar) = (u.abs(), v.abs(), r.abs());
        let mut d11 = -self.x_u - self.x_absu_u * au;
        if cubic_surge {
            d11 -= self.x_uuu * u * u;
        }
        let d22 = -self.y_v - self.y_absv_v * av - self.y_absr_v * ar;
        let d23 = -self.y_r - self.y_absv_r * av - self.y_absr_r * ar;
        let d32 = -self.n_v - self.n_absv_v * av - self.n_absr_v * ar;
        let d33 = -self.n_r - self.n_absv_r * av - self.n_absr_r * ar;
        Mat3::new(d11, 0.0, 0.0, 0.0, d22, d23, 0.0, d32, d33)
    }
}

fn coriolis_from_mass(m: &Mat3, nu: &Vec3) -> Mat3 {
    let (u, v, r) = (nu[0], nu[1], nu[2]);
    let c13 = -m[(1, 1)] * v - m[(1, 2)] * r;
    let c23 = m[(0, 0)] * u;
    Mat3::new(0.0, 0.0, c13, 0.0, 0.0, c23, -c13, -c23, 0.0)
}

/// Earth-from-body rotation about the vertical axis.
pub fn rotation_matrix(psi: f64) -> Mat3 {
    let (s, c) = psi.sin_cos();
    Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// eta_dot = J(psi) nu.
pub fn kinematics_deriv(eta: &Vec3, nu: &Vec3) -> Vec3 {
    rotation_matrix(eta[2]) * nu
}

fn check_positive_definite(m: &Mat3) -> Result<()> {
    // Leading principal minors of the symmetric part.
    let s = (m + m.transpose()) * 0.5;
    let d1 = s[(0, 0)];
    let d2 = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let d3 = s.determinant();
    if d1 > 0.0 && d2 > 0.0 && d3 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "mass matrix is not positive definite (leading minors {d1:.4e}, {d2:.4e}, {d3:.4e})"
        )))
    }
}

/// Closed-form cofactor inverse.
pub(crate) fn invert3(m: &Mat3) -> Option<Mat3> {
    let a = |i: usize, j: usize| m[(i, j)];
    let c00 = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    let c01 = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    let c02 = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    let det = a(0, 0) * c00 + a(0, 1) * c01 + a(0, 2) * c02;
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let c10 = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    let c11 = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    let c12 = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    let c20 = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    let c21 = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    let c22 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    // Inverse is the transposed cofactor matrix over det.
    Some(Mat3::new(c00, c10, c20, c01, c11, c21, c02, c12, c22) / det)
}

fn norm1(m: &Mat3) -> f64 {
    (0..3)
        .map(|j| (0..3).map(|i| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Validated vessel with the mass matrix and its inverse cached.
#[derive(Debug, Clone)]
pub struct Vessel {
    params: VesselParams,
    mass: Mat3,
    mass_inv: Mat3,
    cubic_surge: bool,
}

impl Vessel {
    pub fn new(params: VesselParams, cubic_surge: bool) -> Result<Self> {
        let mass = params.mass_matrix()?;
        let mass_inv = invert3(&mass).ok_or_else(|| Error::InvalidParams("singular mass matrix".into()))?;
        Ok(Self {
            params,
            mass,
            mass_inv,
            cubic_surge,
        })
    }

    pub fn cybership2() -> Self {
        Self::new(VesselParams::cybership2(), false).expect("tabulated parameters are valid")
    }

    pub fn params(&self) -> &VesselParams {
        &self.params
    }

    pub fn mass(&self) -> &Mat3 {
        &self.mass
    }

    pub fn mass_inv(&self) -> &Mat3 {
        &self.mass_inv
    }

    pub fn cubic_surge(&self) -> bool {
        self.cubic_surge
    }

    pub fn coriolis(&self, nu: &Vec3) -> Mat3 {
        coriolis_from_mass(&self.mass, nu)
    }

    pub fn damping(&self, nu: &Vec3) -> Mat3 {
        self.params.damping_matrix(nu, self.cubic_surge)
    }

    /// C(nu) nu + D(nu) nu, the velocity-dependent force the actuators and the
    /// disturbance work against.
    pub fn hydro_forces(&self, nu: &Vec3) -> Vec3 {
        self.coriolis(nu) * nu + self.damping(nu) * nu
    }

    /// nu_dot = M^-1 [tau - C(nu) nu - D(nu) nu + b].
    pub fn dynamics_deriv(&self, nu: &Vec3, tau: &Vec3, b: &Vec3) -> Vec3 {
        self.mass_inv * (tau - self.hydro_forces(nu) + b)
    }
}
