//! Orientations of the electron and nuclear moments.
//!
//! Cartesian unit vectors are canonical. Spherical angles are a derived view;
//! at the poles the azimuth is reported as 0.

use nalgebra::Vector3;
use std::f64::consts::TAU;

use crate::{Error, Result};

const UNIT_TOLERANCE: f64 = 1e-6;

/// Unit vector (sin θ cos φ, sin θ sin φ, cos θ).
pub fn unit_from_angles(polar: f64, azimuth: f64) -> Vector3<f64> {
    let (sp, cp) = polar.sin_cos();
    let (sa, ca) = azimuth.sin_cos();
    Vector3::new(sp * ca, sp * sa, cp)
}

/// Polar angle in [0, π] and azimuth in [0, 2π) of a unit vector.
pub fn angles_from_unit(v: &Vector3<f64>) -> Result<(f64, f64)> {
    let norm = v.norm();
    if !((norm - 1.0).abs() <= UNIT_TOLERANCE) {
        return Err(Error::domain(format!("expected a unit vector, |v| = {norm}")));
    }
    Ok(angles_of(v))
}

/// Angles of an arbitrary nonzero vector; no norm check.
pub(crate) fn angles_of(v: &Vector3<f64>) -> (f64, f64) {
    let transverse = v.x.hypot(v.y);
    let polar = transverse.atan2(v.z);
    if transverse == 0.0 {
        return (polar, 0.0);
    }
    let mut azimuth = v.y.atan2(v.x);
    if azimuth < 0.0 {
        azimuth += TAU;
    }
    if azimuth >= TAU {
        azimuth = 0.0;
    }
    (polar, azimuth)
}

/// Spherical view of a [`MomentState`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalAngles {
    pub theta_e: f64,
    pub phi_e: f64,
    pub theta_n: f64,
    pub phi_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    /// Unit vector along the electron magnetic moment.
    pub electron: Vector3<f64>,
    /// Unit vector along the nuclear magnetic moment.
    pub nucleus: Vector3<f64>,
}

impl MomentState {
    pub fn new(electron: Vector3<f64>, nucleus: Vector3<f64>) -> Result<Self> {
        for (name, v) in [("electron", &electron), ("nucleus", &nucleus)] {
            let norm = v.norm();
            if !((norm - 1.0).abs() <= 1e-9) {
                return Err(Error::domain(format!(
                    "{name} orientation must be a unit vector, |v| = {norm}"
                )));
            }
        }
        Ok(Self { electron, nucleus })
    }

    pub fn from_angles(theta_e: f64, phi_e: f64, theta_n: f64, phi_n: f64) -> Self {
        Self {
            electron: unit_from_angles(theta_e, phi_e),
            nucleus: unit_from_angles(theta_n, phi_n),
        }
    }

    pub fn angles(&self) -> SphericalAngles {
        let (theta_e, phi_e) = angles_of(&self.electron);
        let (theta_n, phi_n) = angles_of(&self.nucleus);
        SphericalAngles {
            theta_e,
            phi_e,
            theta_n,
            phi_n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn poles() {
        assert_eq!(angles_from_unit(&Vector3::z()).unwrap(), (0.0, 0.0));
        assert_eq!(angles_from_unit(&-Vector3::z()).unwrap(), (PI, 0.0));
    }

    #[test]
    fn trajectory_figure_angles() {
        let (theta, phi) = (5.0 * PI / 8.0, 11.0 * PI / 10.0);
        let v = Vector3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let (p, a) = angles_from_unit(&v).unwrap();
        assert!((p - theta).abs() < 1e-14);
        assert!((a - phi).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_unit() {
        assert!(angles_from_unit(&Vector3::new(0.0, 0.0, 1.1)).is_err());
        assert!(angles_from_unit(&Vector3::new(f64::NAN, 0.0, 1.0)).is_err());
        assert!(MomentState::new(Vector3::x() * 2.0, Vector3::z()).is_err());
    }

    #[test]
    fn thousand_random_round_trips() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let polar = rng.random_range(1e-6..PI - 1e-6);
            let azimuth = rng.random_range(0.0..TAU);
            let v = unit_from_angles(polar, azimuth);
            let (p, a) = angles_from_unit(&v).unwrap();
            assert!((unit_from_angles(p, a) - v).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn angles_stay_in_range(x in -1.0..1.0f64, y in -1.0..1.0f64, z in -1.0..1.0f64) {
            let v = Vector3::new(x, y, z);
            prop_assume!(v.norm() > 1e-3);
            let (p, a) = angles_from_unit(&v.normalize()).unwrap();
            prop_assert!((0.0..=PI).contains(&p));
            prop_assert!((0.0..TAU).contains(&a));
        }
    }
}
