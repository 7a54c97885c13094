//! Closed-form flip probability of co-quantum dynamics for the quadrupole
//! null-point passage, used as an oracle for the Monte Carlo pipeline.

use std::f64::consts::PI;

use crate::constants::{ChamberGeometry, HyperfineFields, PhysicalConstants};
use crate::{Error, Result};

/// Mean nuclear polar angle after SG1, ⟨θ_n⟩ = 5π/8.
pub fn mean_theta_n() -> f64 {
    5.0 * PI / 8.0
}

/// Coefficients of W(I) = exp[-√((c_r0/I)² + c_rs²) - c_rr I³].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormCoefficients {
    /// Null-point rotation, A.
    pub c_r0: f64,
    /// Rotation saturation, dimensionless.
    pub c_rs: f64,
    /// Resonant rotation, A⁻³.
    pub c_rr: f64,
}

pub fn coefficients(
    geom: &ChamberGeometry,
    constants: &PhysicalConstants,
    hyperfine: &HyperfineFields,
) -> Result<ClosedFormCoefficients> {
    geom.validate()?;
    constants.validate()?;
    if !(hyperfine.electron >= 0.0 && hyperfine.nuclear >= 0.0) {
        return Err(Error::domain("hyperfine fields must be nonnegative"));
    }
    let (za, v, br) = (geom.wire_depth, geom.speed, geom.remnant_field);
    let mu0 = constants.mu0;
    let ge = constants.gamma_e.abs();
    let (sin_n, cos_n) = mean_theta_n().sin_cos();
    let axial = br + hyperfine.nuclear * cos_n;
    let transverse = hyperfine.nuclear * sin_n;
    if !(axial > 0.0) {
        return Err(Error::domain(
            "remnant field must exceed the nuclear field's axial projection",
        ));
    }
    Ok(ClosedFormCoefficients {
        c_r0: ge * 2.0 * PI * PI * za * za / (mu0 * v) * axial * axial,
        c_rs: ge * PI * za / v * transverse,
        c_rr: mu0.powi(3) * constants.gamma_e.powi(2) * constants.gamma_n / (32.0 * PI * v.powi(3))
            * hyperfine.electron
            * transverse.powi(5)
            / axial.powi(6),
    })
}

/// Closed-form probability of spin flip at wire current `current`.
pub fn w_analytic(current: f64, coeffs: &ClosedFormCoefficients) -> Result<f64> {
    if !(current > 0.0) {
        return Err(Error::domain(format!("wire current must be positive, got {current}")));
    }
    let exponent =
        -(coeffs.c_r0 / current).hypot(coeffs.c_rs) - coeffs.c_rr * current.powi(3);
    Ok(exponent.exp())
}
