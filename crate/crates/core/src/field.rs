//! Magnetic fields inside the inner rotation chamber.
//!
//! Coordinates: the beam travels along +y at z = 0, the wire runs along x at
//! (y, z) = (0, -z_a) carrying current along -x, and the remnant field points
//! along +z. Every field here lies in the yz plane.

use nalgebra::Vector3;
use std::f64::consts::PI;

use crate::constants::{ChamberGeometry, PhysicalConstants, VACUUM_PERMEABILITY};
use crate::{Error, Result};

/// Magnetic flux density in tesla.
pub type FieldSample = Vector3<f64>;

/// Where, and when along the beam, the wire field cancels the remnant field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullPoint {
    /// y_NP, m. The null point itself sits at (y_NP, -z_a).
    pub position: f64,
    /// t_NP = y_NP / v, s.
    pub time: f64,
}

/// Field of an infinite straight wire at (y, z).
pub fn wire_field(y: f64, z: f64, current: f64, geom: &ChamberGeometry) -> Result<FieldSample> {
    let dz = z + geom.wire_depth;
    let r2 = dz * dz + y * y;
    if r2 == 0.0 {
        return Err(Error::Singularity { y, z });
    }
    let scale = VACUUM_PERMEABILITY * current / (2.0 * PI * r2);
    Ok(Vector3::new(0.0, scale * dz, -scale * y))
}

/// Wire field plus the remnant field.
pub fn total_field(y: f64, z: f64, current: f64, geom: &ChamberGeometry) -> Result<FieldSample> {
    let mut b = wire_field(y, z, current, geom)?;
    b.z += geom.remnant_field;
    Ok(b)
}

/// Total field seen by an atom on the beam axis at time t (y = v t, z = 0).
pub fn field_on_path(t: f64, current: f64, geom: &ChamberGeometry) -> Result<FieldSample> {
    check_window(t, geom)?;
    total_field(geom.speed * t, 0.0, current, geom)
}

fn check_window(t: f64, geom: &ChamberGeometry) -> Result<()> {
    let half = geom.half_transit_time();
    if !(t.abs() <= half * (1.0 + 1e-12)) {
        return Err(Error::domain(format!(
            "t = {t:e} s lies outside the chamber window [-{half:e}, {half:e}] s"
        )));
    }
    Ok(())
}

pub fn null_point(current: f64, geom: &ChamberGeometry) -> Result<NullPoint> {
    if !(current > 0.0) {
        return Err(Error::domain(format!(
            "null point needs a positive wire current, got {current}"
        )));
    }
    if !(geom.remnant_field > 0.0) {
        return Err(Error::domain("null point needs a positive remnant field"));
    }
    let position = VACUUM_PERMEABILITY * current / (2.0 * PI * geom.remnant_field);
    Ok(NullPoint {
        position,
        time: position / geom.speed,
    })
}

/// Gradient 2π B_r² / (μ0 I) of the linearized field around the null point, T/m.
pub fn quadrupole_gradient(current: f64, geom: &ChamberGeometry) -> Result<f64> {
    if !(current > 0.0) {
        return Err(Error::domain(format!(
            "quadrupole approximation needs a positive wire current, got {current}"
        )));
    }
    Ok(2.0 * PI * geom.remnant_field.powi(2) / (VACUUM_PERMEABILITY * current))
}

/// First-order expansion of the total field about the null point.
pub fn quadrupole_field(
    y: f64,
    z: f64,
    current: f64,
    geom: &ChamberGeometry,
) -> Result<FieldSample> {
    let g = quadrupole_gradient(current, geom)?;
    let np = null_point(current, geom)?;
    Ok(Vector3::new(
        0.0,
        g * (z + geom.wire_depth),
        g * (y - np.position),
    ))
}

/// Quadrupole field on the beam axis at time t.
pub fn quadrupole_on_path(t: f64, current: f64, geom: &ChamberGeometry) -> Result<FieldSample> {
    Ok(QuadrupolePath::new(current, geom)?.at(t))
}

/// Adiabaticity parameter k = |ω_e / Ω_B| along the beam path, using the
/// full wire + remnant field and ignoring the nuclear field.
///
/// Returns `f64::INFINITY` where the field direction is momentarily
/// stationary (and everywhere when no current flows).
pub fn adiabaticity(
    t: f64,
    current: f64,
    geom: &ChamberGeometry,
    constants: &PhysicalConstants,
) -> f64 {
    if current == 0.0 {
        return f64::INFINITY;
    }
    let (za, v, br) = (geom.wire_depth, geom.speed, geom.remnant_field);
    let vt = v * t;
    let r2 = vt * vt + za * za;
    // a = μ0 I / 2π is the wire-field strength times distance
    let a = VACUUM_PERMEABILITY * current / (2.0 * PI);
    let tilt = 1.0 - 2.0 * br * vt / a;
    if tilt == 0.0 {
        return f64::INFINITY;
    }
    let bracket = tilt + (br / a).powi(2) * r2;
    (constants.gamma_e * a / (za * v) * r2.sqrt() / tilt * bracket.powf(1.5)).abs()
}

/// External field as a function of time along a prescribed path.
pub trait PathField {
    fn at(&self, t: f64) -> FieldSample;
}

/// Quadrupole field along the beam axis:
/// B = G (0, z_a, v (t - t_NP)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadrupolePath {
    pub gradient: f64,
    pub wire_depth: f64,
    pub speed: f64,
    pub null_time: f64,
}

impl QuadrupolePath {
    pub fn new(current: f64, geom: &ChamberGeometry) -> Result<Self> {
        Ok(Self {
            gradient: quadrupole_gradient(current, geom)?,
            wire_depth: geom.wire_depth,
            speed: geom.speed,
            null_time: null_point(current, geom)?.time,
        })
    }
}

impl PathField for QuadrupolePath {
    #[inline]
    fn at(&self, t: f64) -> FieldSample {
        Vector3::new(
            0.0,
            self.gradient * self.wire_depth,
            self.gradient * self.speed * (t - self.null_time),
        )
    }
}

/// Full wire + remnant field along the beam axis, without the window check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WirePath {
    pub current: f64,
    pub geometry: ChamberGeometry,
}

impl PathField for WirePath {
    fn at(&self, t: f64) -> FieldSample {
        // z = 0 never hits the wire since z_a > 0
        total_field(self.geometry.speed * t, 0.0, self.current, &self.geometry)
            .unwrap_or_else(|_| Vector3::new(0.0, 0.0, self.geometry.remnant_field))
    }
}

/// Time-independent field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformField(pub FieldSample);

impl PathField for UniformField {
    #[inline]
    fn at(&self, _t: f64) -> FieldSample {
        self.0
    }
}
