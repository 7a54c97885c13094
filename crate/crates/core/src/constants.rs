//! Species data for potassium-39 and the geometry of the inner rotation chamber.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Vacuum permeability (CODATA 2018), T·m/A.
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;

/// Physical constants of one alkali species.
///
/// Fields are public so alternative species can be assembled with struct
/// update syntax; call [`PhysicalConstants::validate`] on anything that did
/// not come from [`PhysicalConstants::potassium39`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Vacuum permeability, T·m/A.
    pub mu0: f64,
    /// Electron gyromagnetic ratio, rad/(s·T). Negative.
    pub gamma_e: f64,
    /// Nuclear gyromagnetic ratio, rad/(s·T).
    pub gamma_n: f64,
    /// Electron magnetic moment magnitude, J/T.
    pub mu_e: f64,
    /// Nuclear magnetic moment magnitude, J/T.
    pub mu_n: f64,
    /// Van der Waals radius, m.
    pub vdw_radius: f64,
    /// Electron spin quantum number.
    pub electron_spin: f64,
    /// Nuclear spin quantum number.
    pub nuclear_spin: f64,
}

impl PhysicalConstants {
    /// Potassium-39 point values (uncertainties dropped).
    pub const fn potassium39() -> Self {
        Self {
            mu0: VACUUM_PERMEABILITY,
            gamma_e: -1.760_859_630_23e11,
            gamma_n: 1.250_061_2e7,
            mu_e: 9.284_767_704_3e-24,
            mu_n: 1.977_23e-27,
            vdw_radius: 275e-12,
            electron_spin: 0.5,
            nuclear_spin: 1.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.mu0 > 0.0, "mu0 must be positive"),
            (self.gamma_e < 0.0, "gamma_e must be negative"),
            (self.gamma_n > 0.0, "gamma_n must be positive"),
            (self.mu_e > 0.0, "mu_e must be positive"),
            (self.mu_n > 0.0, "mu_n must be positive"),
            (self.vdw_radius > 0.0, "van der Waals radius must be positive"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::domain(msg));
            }
        }
        Ok(())
    }

    pub fn hyperfine_fields(&self) -> HyperfineFields {
        derived_hyperfine_fields(self)
    }

    /// Electron Larmor angular frequency |γ_e B| in a field of magnitude `field`.
    pub fn electron_larmor(&self, field: f64) -> f64 {
        (self.gamma_e * field).abs()
    }

    /// Nuclear Larmor angular frequency |γ_n B| in a field of magnitude `field`.
    pub fn nuclear_larmor(&self, field: f64) -> f64 {
        (self.gamma_n * field).abs()
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::potassium39()
    }
}

/// Torque-averaged fields each moment produces at the other, in tesla.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperfineFields {
    /// Field of the electron moment acting on the nucleus (B_e).
    pub electron: f64,
    /// Field of the nuclear moment acting on the electron (B_n).
    pub nuclear: f64,
}

impl HyperfineFields {
    /// No coupling between the moments.
    pub const OFF: Self = Self {
        electron: 0.0,
        nuclear: 0.0,
    };
}

/// B = 5 μ0 μ / (16 π R³) for the electron and nuclear moments.
pub fn derived_hyperfine_fields(constants: &PhysicalConstants) -> HyperfineFields {
    let factor = 5.0 * constants.mu0 / (16.0 * PI * constants.vdw_radius.powi(3));
    HyperfineFields {
        electron: factor * constants.mu_e,
        nuclear: factor * constants.mu_n,
    }
}

/// Inner rotation chamber. The beam runs along +y at z = 0; the wire runs
/// along x at depth `wire_depth` below it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChamberGeometry {
    /// z_a, m.
    pub wire_depth: f64,
    /// Chamber length d along the beam, m.
    pub length: f64,
    /// Atom speed v, m/s.
    pub speed: f64,
    /// Remnant field B_r along +z, T.
    pub remnant_field: f64,
}

impl ChamberGeometry {
    /// Parameters of the 1933 Frisch–Segrè apparatus.
    pub const fn frisch_segre() -> Self {
        Self {
            wire_depth: 105e-6,
            length: 16.3e-3,
            speed: 800.0,
            remnant_field: 42e-6,
        }
    }

    pub fn new(wire_depth: f64, length: f64, speed: f64, remnant_field: f64) -> Result<Self> {
        let geom = Self {
            wire_depth,
            length,
            speed,
            remnant_field,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("wire_depth", self.wire_depth),
            ("length", self.length),
            ("speed", self.speed),
            ("remnant_field", self.remnant_field),
        ];
        for (name, value) in fields {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::domain(format!(
                    "chamber {name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// d / (2v): the chamber is traversed over [-half_transit, +half_transit].
    pub fn half_transit_time(&self) -> f64 {
        self.length / (2.0 * self.speed)
    }
}

impl Default for ChamberGeometry {
    fn default() -> Self {
        Self::frisch_segre()
    }
}
