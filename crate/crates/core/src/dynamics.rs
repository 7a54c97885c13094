//! Coupled electron–nuclear Bloch dynamics in the inner rotation chamber.
//!
//! The electron moment is integrated as a Cartesian vector, which is regular
//! at the poles (the transit starts exactly at θ_e = π). The nuclear polar
//! angle is frozen and only its azimuth evolves.

use nalgebra::{Matrix3, SMatrix, SVector, Vector3, Vector4};
use std::f64::consts::PI;

use crate::constants::{ChamberGeometry, HyperfineFields, PhysicalConstants};
use crate::field::{quadrupole_on_path, FieldSample, PathField, QuadrupolePath};
use crate::ode::{self, OdeSettings, OdeSystem, SolverStats};
use crate::state::{angles_of, unit_from_angles, MomentState, SphericalAngles};
use crate::{Error, Result};

/// Length of the trailing window over which θ_e is averaged, s.
pub const AVERAGING_WINDOW: f64 = 2e-6;

/// Time derivatives (dμ̂_e/dt, dμ̂_n/dt) of the full coupled Bloch equations.
pub fn rhs_full(
    state: &MomentState,
    b_ext: &FieldSample,
    hyperfine: &HyperfineFields,
    constants: &PhysicalConstants,
) -> (Vector3<f64>, Vector3<f64>) {
    let on_electron = b_ext + state.nucleus * hyperfine.nuclear;
    let on_nucleus = b_ext + state.electron * hyperfine.electron;
    (
        state.electron.cross(&on_electron) * constants.gamma_e,
        state.nucleus.cross(&on_nucleus) * constants.gamma_n,
    )
}

/// Angular rates of the reduced system (θ̇_n = 0) in the quadrupole field
/// at time `t`.
///
/// At a pole the azimuth is undefined; the cot θ term is then dropped and
/// the azimuthal rate reports only the axial precession.
pub fn rhs_reduced(
    angles: &SphericalAngles,
    t: f64,
    current: f64,
    geom: &ChamberGeometry,
    constants: &PhysicalConstants,
) -> Result<SphericalAngles> {
    let b = quadrupole_on_path(t, current, geom)?;
    Ok(reduced_angular_rates(
        angles,
        &b,
        &constants.hyperfine_fields(),
        constants,
    ))
}

/// Reduced angular equations for an arbitrary external field.
pub fn reduced_angular_rates(
    a: &SphericalAngles,
    b: &FieldSample,
    hyperfine: &HyperfineFields,
    constants: &PhysicalConstants,
) -> SphericalAngles {
    let (be, bn) = (hyperfine.electron, hyperfine.nuclear);
    let (ge, gn) = (constants.gamma_e, constants.gamma_n);
    let (ste, cte) = a.theta_e.sin_cos();
    let (stn, ctn) = a.theta_n.sin_cos();
    let (spe, cpe) = a.phi_e.sin_cos();
    let (spn, cpn) = a.phi_n.sin_cos();
    let (sd, cd) = (a.phi_n - a.phi_e).sin_cos();
    let cot = |s: f64, c: f64| if s == 0.0 { 0.0 } else { c / s };

    let theta_e = -ge * (b.y * cpe - b.x * spe + bn * stn * sd);
    let phi_e = -ge
        * (b.z + bn * ctn
            - cot(ste, cte) * (b.x * cpe + b.y * spe + bn * stn * cd));
    let phi_n = -gn
        * (b.z + be * cte
            - cot(stn, ctn) * (b.x * cpn + b.y * spn + be * ste * cd));
    SphericalAngles {
        theta_e,
        phi_e,
        theta_n: 0.0,
        phi_n,
    }
}

/// Reduced system in integration variables (μ̂_e,x, μ̂_e,y, μ̂_e,z, φ_n).
pub struct ReducedSystem<'a, F: ?Sized> {
    field: &'a F,
    gamma_e: f64,
    gamma_n: f64,
    b_e: f64,
    b_n: f64,
    sin_theta_n: f64,
    cos_theta_n: f64,
    cot_theta_n: f64,
}

impl<'a, F: PathField + ?Sized> ReducedSystem<'a, F> {
    pub fn new(
        field: &'a F,
        theta_n: f64,
        hyperfine: &HyperfineFields,
        constants: &PhysicalConstants,
    ) -> Result<Self> {
        let (sin_theta_n, cos_theta_n) = theta_n.sin_cos();
        if !(theta_n > 0.0 && theta_n < PI) || sin_theta_n.abs() < 1e-12 {
            return Err(Error::domain(format!(
                "nuclear polar angle must lie strictly inside (0, π), got {theta_n}"
            )));
        }
        Ok(Self {
            field,
            gamma_e: constants.gamma_e,
            gamma_n: constants.gamma_n,
            b_e: hyperfine.electron,
            b_n: hyperfine.nuclear,
            sin_theta_n,
            cos_theta_n,
            cot_theta_n: cos_theta_n / sin_theta_n,
        })
    }

    #[inline]
    fn nucleus(&self, phi_n: f64) -> (Vector3<f64>, f64, f64) {
        let (s, c) = phi_n.sin_cos();
        (
            Vector3::new(self.sin_theta_n * c, self.sin_theta_n * s, self.cos_theta_n),
            s,
            c,
        )
    }
}

impl<F: PathField + ?Sized> OdeSystem<4> for ReducedSystem<'_, F> {
    #[inline]
    fn rhs(&self, t: f64, y: &Vector4<f64>) -> Vector4<f64> {
        let b = self.field.at(t);
        let e = Vector3::new(y[0], y[1], y[2]);
        let (n, spn, cpn) = self.nucleus(y[3]);
        let de = e.cross(&(b + n * self.b_n)) * self.gamma_e;
        let transverse = b.x * cpn + b.y * spn + self.b_e * (e.x * cpn + e.y * spn);
        let dphi = -self.gamma_n * (b.z + self.b_e * e.z - self.cot_theta_n * transverse);
        Vector4::new(de.x, de.y, de.z, dphi)
    }

    fn project(&self, y: &mut Vector4<f64>) {
        let norm = y.fixed_rows::<3>(0).norm();
        y.fixed_rows_mut::<3>(0).unscale_mut(norm);
    }

    fn jacobian(&self, t: f64, y: &Vector4<f64>) -> SMatrix<f64, 4, 4> {
        let b = self.field.at(t);
        let e = Vector3::new(y[0], y[1], y[2]);
        let (n, spn, cpn) = self.nucleus(y[3]);
        let beff = b + n * self.b_n;
        let ge = self.gamma_e;
        let gn = self.gamma_n;
        let dn = Vector3::new(-self.sin_theta_n * spn, self.sin_theta_n * cpn, 0.0);
        let de_dphi = e.cross(&dn) * (ge * self.b_n);
        let cot = self.cot_theta_n;
        let dphi_dphi = gn
            * cot
            * (-b.x * spn + b.y * cpn + self.b_e * (-e.x * spn + e.y * cpn));
        SMatrix::<f64, 4, 4>::new(
            0.0, ge * beff.z, -ge * beff.y, de_dphi.x,
            -ge * beff.z, 0.0, ge * beff.x, de_dphi.y,
            ge * beff.y, -ge * beff.x, 0.0, de_dphi.z,
            gn * cot * self.b_e * cpn, gn * cot * self.b_e * spn, -gn * self.b_e, dphi_dphi,
        )
    }
}

/// Full six-component system (μ̂_e, μ̂_n) in an external path field.
pub struct FullSystem<'a, F: ?Sized> {
    field: &'a F,
    hyperfine: HyperfineFields,
    constants: PhysicalConstants,
}

impl<'a, F: PathField + ?Sized> FullSystem<'a, F> {
    pub fn new(field: &'a F, hyperfine: &HyperfineFields, constants: &PhysicalConstants) -> Self {
        Self {
            field,
            hyperfine: *hyperfine,
            constants: *constants,
        }
    }
}

fn split6(y: &SVector<f64, 6>) -> MomentState {
    MomentState {
        electron: Vector3::new(y[0], y[1], y[2]),
        nucleus: Vector3::new(y[3], y[4], y[5]),
    }
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    // skew(v) * w = v × w
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

impl<F: PathField + ?Sized> OdeSystem<6> for FullSystem<'_, F> {
    fn rhs(&self, t: f64, y: &SVector<f64, 6>) -> SVector<f64, 6> {
        let (de, dn) = rhs_full(&split6(y), &self.field.at(t), &self.hyperfine, &self.constants);
        SVector::<f64, 6>::new(de.x, de.y, de.z, dn.x, dn.y, dn.z)
    }

    fn jacobian(&self, t: f64, y: &SVector<f64, 6>) -> SMatrix<f64, 6, 6> {
        let s = split6(y);
        let b = self.field.at(t);
        let (ge, gn) = (self.constants.gamma_e, self.constants.gamma_n);
        let (be, bn) = (self.hyperfine.electron, self.hyperfine.nuclear);
        // d(e × B)/de = -skew(B); d(e × n)/dn = skew(e)
        let mut jac = SMatrix::<f64, 6, 6>::zeros();
        jac.fixed_view_mut::<3, 3>(0, 0)
            .copy_from(&(-skew(&(b + s.nucleus * bn)) * ge));
        jac.fixed_view_mut::<3, 3>(0, 3)
            .copy_from(&(skew(&s.electron) * (ge * bn)));
        jac.fixed_view_mut::<3, 3>(3, 3)
            .copy_from(&(-skew(&(b + s.electron * be)) * gn));
        jac.fixed_view_mut::<3, 3>(3, 0)
            .copy_from(&(skew(&s.nucleus) * (gn * be)));
        jac
    }
}

/// Dense record of one transit.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    /// Sample times, s.
    pub times: Vec<f64>,
    pub theta_e: Vec<f64>,
    pub phi_e: Vec<f64>,
    pub phi_n: Vec<f64>,
    /// Nuclear polar angle, constant over the transit.
    pub theta_n0: f64,
    /// Mean θ_e over the trailing averaging window.
    pub theta_e_final: f64,
    /// Largest deviation of |μ̂_e| from 1 in the integrated Cartesian state.
    pub norm_drift: f64,
    pub stats: SolverStats,
}

impl TrajectoryResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Integrates one atom through the chamber, t ∈ [-d/2v, d/2v], under the
/// quadrupole field of wire current `current`.
pub fn integrate_atom(
    init: &MomentState,
    current: f64,
    geom: &ChamberGeometry,
    constants: &PhysicalConstants,
    settings: &OdeSettings,
) -> Result<TrajectoryResult> {
    let path = QuadrupolePath::new(current, geom)?;
    let half = geom.half_transit_time();
    integrate_in_field(
        init,
        &path,
        -half,
        half,
        &constants.hyperfine_fields(),
        constants,
        settings,
        AVERAGING_WINDOW.min(2.0 * half),
    )
}

/// Reduced-system transit in an arbitrary path field over [t0, t1].
#[allow(clippy::too_many_arguments)]
pub fn integrate_in_field<F: PathField + ?Sized>(
    init: &MomentState,
    field: &F,
    t0: f64,
    t1: f64,
    hyperfine: &HyperfineFields,
    constants: &PhysicalConstants,
    settings: &OdeSettings,
    averaging_window: f64,
) -> Result<TrajectoryResult> {
    let angles = init.angles();
    let system = ReducedSystem::new(field, angles.theta_n, hyperfine, constants)?;
    let y0 = Vector4::new(init.electron.x, init.electron.y, init.electron.z, angles.phi_n);

    let capacity = ((t1 - t0) / settings.dense_output_step).ceil() as usize + 2;
    let mut times = Vec::with_capacity(capacity);
    let mut theta_e = Vec::with_capacity(capacity);
    let mut phi_e = Vec::with_capacity(capacity);
    let mut phi_n = Vec::with_capacity(capacity);
    let mut norm_drift = 0.0f64;
    let (_, stats) = ode::solve(&system, t0, y0, t1, settings, |t, y| {
        let e = Vector3::new(y[0], y[1], y[2]);
        let norm = e.norm();
        norm_drift = norm_drift.max((norm - 1.0).abs());
        let (th, ph) = angles_of(&(e / norm));
        times.push(t);
        theta_e.push(th);
        phi_e.push(ph);
        phi_n.push(y[3].rem_euclid(2.0 * PI));
    })?;

    let mut traj = TrajectoryResult {
        times,
        theta_e,
        phi_e,
        phi_n,
        theta_n0: angles.theta_n,
        theta_e_final: f64::NAN,
        norm_drift,
        stats,
    };
    traj.theta_e_final = final_polar_angle(&traj, averaging_window)?;
    Ok(traj)
}

/// Mean of θ_e over samples in the trailing `window` of the trajectory,
/// clamped to [0, π].
pub fn final_polar_angle(traj: &TrajectoryResult, window: f64) -> Result<f64> {
    let (Some(&start), Some(&end)) = (traj.times.first(), traj.times.last()) else {
        return Err(Error::domain("trajectory has no samples"));
    };
    if !(window > 0.0) {
        return Err(Error::domain(format!("averaging window must be positive, got {window}")));
    }
    let span = end - start;
    if window > span * (1.0 + 1e-12) {
        return Err(Error::domain(format!(
            "averaging window {window:e} s exceeds trajectory span {span:e} s"
        )));
    }
    let cutoff = end - window * (1.0 + 1e-12);
    let (sum, count) = traj
        .times
        .iter()
        .zip(&traj.theta_e)
        .filter(|(t, _)| **t >= cutoff)
        .fold((0.0, 0usize), |(s, n), (_, th)| (s + th, n + 1));
    if count == 0 {
        return Err(Error::domain("no samples inside the averaging window"));
    }
    Ok((sum / count as f64).clamp(0.0, PI))
}

/// Initial state handed to the chamber: electron along -z (after the
/// adiabatic pre-flip) and the sampled nuclear orientation.
pub fn chamber_entry_state(phi_e0: f64, theta_n0: f64, phi_n0: f64) -> MomentState {
    MomentState {
        electron: unit_from_angles(PI, phi_e0),
        nucleus: unit_from_angles(theta_n0, phi_n0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::angles_from_unit;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::TAU;

    fn k39() -> PhysicalConstants {
        PhysicalConstants::potassium39()
    }

    fn azimuth_rate(v: &Vector3<f64>, dv: &Vector3<f64>) -> f64 {
        (v.x * dv.y - v.y * dv.x) / (v.x * v.x + v.y * v.y)
    }

    #[test]
    fn pure_larmor_precession_rates() {
        let c = k39();
        let b = Vector3::new(0.0, 0.0, 42e-6);
        let s = MomentState::from_angles(1.1, 0.4, 2.0, 5.0);
        let (de, _) = rhs_full(&s, &b, &HyperfineFields::OFF, &c);
        assert!(de.z.abs() < 1e-20);
        let rate = azimuth_rate(&s.electron, &de);
        assert!((rate + c.gamma_e * 42e-6).abs() < 1e-9 * (c.gamma_e * 42e-6).abs());
    }

    #[test]
    fn aligned_moments_do_not_move() {
        let c = k39();
        let dir = Vector3::new(1.0, 2.0, -0.5).normalize();
        let s = MomentState::new(dir, dir).unwrap();
        let (de, dn) = rhs_full(&s, &(dir * 3e-5), &c.hyperfine_fields(), &c);
        assert!(de.norm() < 1e-9 && dn.norm() < 1e-12);
    }

    #[test]
    fn reduced_rates_examples() {
        let c = k39();
        let hf = c.hyperfine_fields();
        let g = ChamberGeometry::frisch_segre();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let a = SphericalAngles {
                theta_e: rng.random_range(0.0..PI),
                phi_e: rng.random_range(0.0..TAU),
                theta_n: rng.random_range(0.0..PI),
                phi_n: rng.random_range(0.0..TAU),
            };
            let r = rhs_reduced(&a, rng.random_range(-1e-5..1e-5), 0.1, &g, &c).unwrap();
            assert_eq!(r.theta_n, 0.0);
        }
        let b = Vector3::new(0.0, 3e-5, 2e-5);
        let a = SphericalAngles {
            theta_e: PI / 2.0,
            phi_e: PI / 2.0,
            theta_n: 1.0,
            phi_n: 2.0,
        };
        let r = reduced_angular_rates(&a, &b, &HyperfineFields { nuclear: 0.0, ..hf }, &c);
        assert!(r.theta_e.abs() < 1e-9 * (c.gamma_e * b.y).abs());
        assert!((r.phi_e + c.gamma_e * b.z).abs() < 1e-9 * (c.gamma_e * b.z).abs());
    }

    #[test]
    fn pole_rates_are_finite() {
        let c = k39();
        let b = Vector3::new(0.0, 3e-5, -2e-3);
        for (te, tn) in [(PI, 1.0), (0.0, 2.0), (1.0, 0.0), (PI, PI)] {
            let a = SphericalAngles {
                theta_e: te,
                phi_e: 0.3,
                theta_n: tn,
                phi_n: 1.2,
            };
            let r = reduced_angular_rates(&a, &b, &c.hyperfine_fields(), &c);
            assert!([r.theta_e, r.phi_e, r.theta_n, r.phi_n].iter().all(|x| x.is_finite()));
        }
    }

    #[test]
    fn reduced_matches_cartesian_chain_rule() {
        // map the Cartesian torque equations to angular rates and compare
        let c = k39();
        let hf = c.hyperfine_fields();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let a = SphericalAngles {
                theta_e: rng.random_range(0.05..PI - 0.05),
                phi_e: rng.random_range(0.0..TAU),
                theta_n: rng.random_range(0.05..PI - 0.05),
                phi_n: rng.random_range(0.0..TAU),
            };
            let b = Vector3::new(0.0, rng.random_range(-1e-4..1e-4), rng.random_range(-1e-3..1e-3));
            let s = MomentState::from_angles(a.theta_e, a.phi_e, a.theta_n, a.phi_n);
            let (de, dn) = rhs_full(&s, &b, &hf, &c);
            let expected = [
                -de.z / a.theta_e.sin(),
                azimuth_rate(&s.electron, &de),
                azimuth_rate(&s.nucleus, &dn),
            ];
            let r = reduced_angular_rates(&a, &b, &hf, &c);
            for (got, want) in [r.theta_e, r.phi_e, r.phi_n].iter().zip(expected) {
                let scale = want.abs().max(1e-3 * c.gamma_e.abs() * b.norm()).max(1.0);
                worst = worst.max((got - want).abs() / scale);
            }
        }
        assert!(worst < 1e-10, "worst relative discrepancy {worst:e}");
    }

    #[test]
    fn cartesian_reduced_rhs_matches_angular_phi_n() {
        let c = k39();
        let hf = c.hyperfine_fields();
        let path = QuadrupolePath::new(0.1, &ChamberGeometry::frisch_segre()).unwrap();
        let sys = ReducedSystem::new(&path, 1.9, &hf, &c).unwrap();
        let s = MomentState::from_angles(2.5, 0.7, 1.9, 4.0);
        let y = Vector4::new(s.electron.x, s.electron.y, s.electron.z, 4.0);
        let t = 3e-7;
        let f = sys.rhs(t, &y);
        let r = reduced_angular_rates(&s.angles(), &path.at(t), &hf, &c);
        assert!((f[3] - r.phi_n).abs() < 1e-9 * r.phi_n.abs().max(1.0));
        let (de, _) = rhs_full(&s, &path.at(t), &hf, &c);
        assert!((Vector3::new(f[0], f[1], f[2]) - de).norm() < 1e-12 * de.norm());
    }

    #[test]
    fn analytic_jacobians_match_finite_differences() {
        struct Fd<'a, S>(&'a S);
        impl<S: OdeSystem<4>> OdeSystem<4> for Fd<'_, S> {
            fn rhs(&self, t: f64, y: &Vector4<f64>) -> Vector4<f64> {
                self.0.rhs(t, y)
            }
        }
        struct Fd6<'a, S>(&'a S);
        impl<S: OdeSystem<6>> OdeSystem<6> for Fd6<'_, S> {
            fn rhs(&self, t: f64, y: &SVector<f64, 6>) -> SVector<f64, 6> {
                self.0.rhs(t, y)
            }
        }
        let c = k39();
        let hf = c.hyperfine_fields();
        let path = QuadrupolePath::new(0.05, &ChamberGeometry::frisch_segre()).unwrap();
        let sys = ReducedSystem::new(&path, 2.1, &hf, &c).unwrap();
        let y = Vector4::new(0.3, -0.4, 0.866, 1.3);
        let (a, n) = (sys.jacobian(1e-6, &y), Fd(&sys).jacobian(1e-6, &y));
        assert!((a - n).norm() < 1e-6 * a.norm(), "{a}\n{n}");

        let full = FullSystem::new(&path, &hf, &c);
        let s = MomentState::from_angles(1.0, 2.0, 2.5, 0.5);
        let y6 = SVector::<f64, 6>::from_iterator(s.electron.iter().chain(s.nucleus.iter()).copied());
        let (a, n) = (full.jacobian(-2e-6, &y6), Fd6(&full).jacobian(-2e-6, &y6));
        assert!((a - n).norm() < 1e-6 * a.norm(), "{a}\n{n}");
    }

    #[test]
    fn polar_nuclear_angle_is_rejected() {
        let c = k39();
        let g = ChamberGeometry::frisch_segre();
        let s = ODE_DEFAULTS;
        for theta_n in [0.0, PI] {
            let init = chamber_entry_state(0.0, theta_n, 1.0);
            assert!(integrate_atom(&init, 0.1, &g, &c, &s).is_err());
        }
    }

    const ODE_DEFAULTS: OdeSettings = OdeSettings {
        rel_tol: 1e-8,
        abs_tol: 1e-8,
        max_step: 1e-7,
        dense_output_step: 10e-9,
    };

    fn synthetic(theta: impl Fn(f64) -> f64, n: usize, dt: f64) -> TrajectoryResult {
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        TrajectoryResult {
            theta_e: times.iter().map(|&t| theta(t)).collect(),
            phi_e: vec![0.0; n],
            phi_n: vec![0.0; n],
            times,
            theta_n0: 1.0,
            theta_e_final: f64::NAN,
            norm_drift: 0.0,
            stats: SolverStats::default(),
        }
    }

    #[test]
    fn final_angle_of_constant_and_sinusoid() {
        let flat = synthetic(|_| 1.25, 500, 10e-9);
        assert_eq!(final_polar_angle(&flat, 2e-6).unwrap(), 1.25);
        // 20 ns period, 2 µs window = 100 full periods on a 1 ns grid; the
        // window holds both endpoints so trim one sample by using 1999 ns
        let (c, amp, omega) = (2.0, 0.3, TAU / 20e-9);
        let wave = synthetic(|t| c + amp * (omega * t).sin(), 5001, 1e-9);
        let mean = final_polar_angle(&wave, 1999e-9).unwrap();
        assert!((mean - c).abs() < amp / 1000.0, "{mean}");
    }

    #[test]
    fn final_angle_errors() {
        let flat = synthetic(|_| 1.0, 100, 10e-9);
        assert!(final_polar_angle(&flat, 2e-6).is_err());
        assert!(final_polar_angle(&flat, 0.0).is_err());
        let empty = synthetic(|_| 1.0, 0, 10e-9);
        assert!(final_polar_angle(&empty, 1e-9).is_err());
        let clamped = synthetic(|_| PI + 1e-15, 10, 1e-9);
        assert!(final_polar_angle(&clamped, 5e-9).unwrap() <= PI);
    }

    #[test]
    fn transit_keeps_theta_n_and_moves_phi_n() {
        let c = k39();
        let g = ChamberGeometry::frisch_segre();
        let init = chamber_entry_state(0.0, 5.0 * PI / 8.0, 11.0 * PI / 10.0);
        let traj = integrate_atom(&init, 0.2, &g, &c, &ODE_DEFAULTS).unwrap();
        assert_eq!(traj.theta_n0, init.angles().theta_n);
        assert!(traj.phi_n.iter().any(|p| (p - traj.phi_n[0]).abs() > 1e-3));
        assert!(traj.theta_e.iter().all(|t| (0.0..=PI).contains(t)));
        assert!(traj.norm_drift < 1e-6, "{}", traj.norm_drift);
        assert!((traj.times[0] + g.half_transit_time()).abs() < 1e-18);
        assert_eq!(*traj.times.last().unwrap(), g.half_transit_time());
        let again = integrate_atom(&init, 0.2, &g, &c, &ODE_DEFAULTS).unwrap();
        assert_eq!(traj, again);
        let (_, phi) = angles_from_unit(&init.nucleus).unwrap();
        assert!((phi - 11.0 * PI / 10.0).abs() < 1e-12);
    }
}
