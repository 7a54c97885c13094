//! Adaptive three-stage Radau IIA integrator (order 5) with dense output.
//!
//! A port of the control logic of Hairer & Wanner's RADAU5 for small
//! fixed-size systems: simplified Newton iterations on the transformed
//! stage equations (one real and one complex linear system per iteration),
//! embedded error estimate filtered through (γ/h − J)⁻¹, Gustafsson
//! step-size prediction, and Jacobian/LU reuse while Newton converges fast.
//! The method is L-stable and stiffly accurate.

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerances and output spacing for [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Upper bound on the step size, s.
    pub max_step: f64,
    /// Spacing of the dense-output grid, s.
    pub dense_output_step: f64,
}

impl Default for OdeSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-8,
            max_step: 1e-7,
            dense_output_step: 10e-9,
        }
    }
}

impl OdeSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, tol) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(tol > 0.0 && tol <= 1e-3) {
                return Err(Error::domain(format!("{name} must lie in (0, 1e-3], got {tol}")));
            }
        }
        if !(self.max_step > 0.0) {
            return Err(Error::domain("max_step must be positive"));
        }
        if !(self.dense_output_step > 0.0 && self.dense_output_step.is_finite()) {
            return Err(Error::domain("dense_output_step must be positive"));
        }
        Ok(())
    }
}

/// A first-order system y' = f(t, y) of fixed dimension.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &SVector<f64, N>) -> SVector<f64, N>;

    /// ∂f/∂y. The default uses forward differences.
    fn jacobian(&self, t: f64, y: &SVector<f64, N>) -> SMatrix<f64, N, N> {
        let f0 = self.rhs(t, y);
        let mut jac = SMatrix::<f64, N, N>::zeros();
        let mut yp = *y;
        for j in 0..N {
            let delta = (f64::EPSILON * 1e-5f64.max(y[j].abs())).sqrt();
            yp[j] = y[j] + delta;
            let column = (self.rhs(t, &yp) - f0) / delta;
            jac.set_column(j, &column);
            yp[j] = y[j];
        }
        jac
    }

    /// Maps an accepted state back onto the solution manifold. The default
    /// leaves it untouched.
    fn project(&self, _y: &mut SVector<f64, N>) {}
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evaluations: usize,
    pub jacobian_evaluations: usize,
    pub decompositions: usize,
}

const SQRT6: f64 = 2.449_489_742_783_178;
const C1: f64 = (4.0 - SQRT6) / 10.0;
const C2: f64 = (4.0 + SQRT6) / 10.0;
const C1M1: f64 = C1 - 1.0;
const C2M1: f64 = C2 - 1.0;
const C1MC2: f64 = C1 - C2;

// eigenvalues of the inverse Radau IIA matrix: γ (real) and α ± iβ
const GAMMA: f64 = 3.637_834_252_744_495_7;
const ALPHA: f64 = 2.681_082_873_627_752;
const BETA: f64 = 3.050_430_199_247_410_6;

// error estimate weights
const E1: f64 = -2.762_305_454_748_599_4;
const E2: f64 = 0.379_935_598_252_728_9;
const E3: f64 = -0.091_629_609_865_225_79;

const T: [[f64; 3]; 3] = [
    [
        9.123_239_487_089_294_3e-2,
        -0.141_255_295_020_954_2,
        -3.002_919_410_514_742_4e-2,
    ],
    [0.241_717_932_707_107, 0.204_129_352_293_799_93, 0.382_942_112_757_261_9],
    [0.966_048_182_615_092_9, 1.0, 0.0],
];

const TI: [[f64; 3]; 3] = [
    [4.325_579_890_063_155, 0.339_199_251_815_809_87, 0.541_770_539_935_874_9],
    [-4.178_718_591_551_905, -0.327_682_820_761_062_4, 0.476_623_554_500_550_45],
    [-0.502_872_634_945_786_9, 2.571_926_949_855_605_3, -0.596_039_204_828_224_9],
];

const MAX_NEWTON: usize = 7;
const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 1.0 / 8.0;
const FAC_MAX: f64 = 5.0;
const JACOBIAN_REUSE_THETA: f64 = 0.001;
const KEEP_STEP_LOW: f64 = 1.0;
const KEEP_STEP_HIGH: f64 = 1.2;
const MAX_STEPS: usize = 50_000_000;

/// Dense LU factorization with partial pivoting for small fixed-size systems.
struct Lu<T, const N: usize> {
    lu: [[T; N]; N],
    perm: [usize; N],
}

trait Scalar:
    Copy
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + nalgebra::Scalar
{
    fn magnitude(self) -> f64;
    fn zero() -> Self;
}

impl Scalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
    fn zero() -> Self {
        0.0
    }
}

impl Scalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

impl<T: Scalar, const N: usize> Lu<T, N> {
    fn new(mut a: [[T; N]; N]) -> Option<Self> {
        let mut perm = [0usize; N];
        for (i, p) in perm.iter_mut().enumerate() {
            *p = i;
        }
        for k in 0..N {
            let pivot = (k..N)
                .max_by(|&i, &j| a[i][k].magnitude().total_cmp(&a[j][k].magnitude()))
                .unwrap_or(k);
            if a[pivot][k].magnitude() == 0.0 {
                return None;
            }
            a.swap(k, pivot);
            perm.swap(k, pivot);
            for i in k + 1..N {
                let factor = a[i][k] / a[k][k];
                a[i][k] = factor;
                for j in k + 1..N {
                    a[i][j] = a[i][j] - factor * a[k][j];
                }
            }
        }
        Some(Self { lu: a, perm })
    }

    fn solve(&self, b: &SVector<T, N>) -> SVector<T, N> {
        let mut x = SVector::<T, N>::from_fn(|i, _| b[self.perm[i]]);
        for i in 0..N {
            for j in 0..i {
                x[i] = x[i] - self.lu[i][j] * x[j];
            }
        }
        for i in (0..N).rev() {
            for j in i + 1..N {
                x[i] = x[i] - self.lu[i][j] * x[j];
            }
            x[i] = x[i] / self.lu[i][i];
        }
        x
    }
}

struct Factors<const N: usize> {
    real: Lu<f64, N>,
    complex: Lu<Complex64, N>,
}

fn factorize<const N: usize>(jac: &SMatrix<f64, N, N>, h: f64) -> Option<Factors<N>> {
    let fac1 = GAMMA / h;
    let shift = Complex64::new(ALPHA / h, BETA / h);
    let mut real = [[0.0; N]; N];
    let mut complex = [[Complex64::zero(); N]; N];
    for i in 0..N {
        for j in 0..N {
            real[i][j] = -jac[(i, j)];
            complex[i][j] = Complex64::new(-jac[(i, j)], 0.0);
        }
        real[i][i] += fac1;
        complex[i][i] += shift;
    }
    Some(Factors {
        real: Lu::new(real)?,
        complex: Lu::new(complex)?,
    })
}

#[inline]
fn rms<const N: usize>(v: &SVector<f64, N>, scale: &SVector<f64, N>) -> f64 {
    (v.component_div(scale).norm_squared() / N as f64).sqrt()
}

/// Integrates `system` from `t0` to `t_end` (> `t0`).
///
/// `observer` receives the solution on the grid t0 + k·dense_output_step
/// (k = 0, 1, ...) and once more at `t_end` if the grid does not land on it.
/// Returns the state at `t_end`.
pub fn solve<const N: usize, S, F>(
    system: &S,
    t0: f64,
    y0: SVector<f64, N>,
    t_end: f64,
    settings: &OdeSettings,
    mut observer: F,
) -> Result<(SVector<f64, N>, SolverStats)>
where
    S: OdeSystem<N> + ?Sized,
    F: FnMut(f64, &SVector<f64, N>),
{
    settings.validate()?;
    if !(t_end > t0) {
        return Err(Error::domain("integration interval must have t_end > t0"));
    }
    let fail = |time: f64, reason: &str| Error::Integration {
        time,
        reason: reason.to_owned(),
    };

    // tolerance transformation of RADAU5: the embedded estimate is of lower
    // order, so it is compared against a rescaled tolerance
    let quot = settings.abs_tol / settings.rel_tol;
    let rtol = 0.1 * settings.rel_tol.powf(2.0 / 3.0);
    let atol = rtol * quot;
    let uround = f64::EPSILON;
    let fnewt = (10.0 * uround / rtol).max(0.03f64.min(rtol.sqrt()));

    let span = t_end - t0;
    let grid_step = settings.dense_output_step;
    let mut next_output = 0usize;
    let grid_time = |k: usize| t0 + k as f64 * grid_step;

    let mut stats = SolverStats::default();
    let mut t = t0;
    let mut y = y0;
    observer(t, &y);
    next_output += 1;

    let mut f0 = system.rhs(t, &y);
    stats.rhs_evaluations += 1;
    if !f0.iter().all(|v| v.is_finite()) {
        return Err(fail(t, "non-finite derivative at the initial state"));
    }

    let mut scale = y.map(|v| atol + rtol * v.abs());
    let mut h = {
        let d0 = rms(&y, &scale);
        let d1 = rms(&f0, &scale);
        let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        guess.min(settings.max_step).min(span)
    };

    // dense-output / starting-value polynomial of the last accepted step
    let mut cont = [SVector::<f64, N>::zeros(); 3];
    let mut h_old = h;
    let mut first = true;
    let mut reject = false;
    let mut last = false;
    let mut theta = 1.0f64;
    let mut faccon = 1.0f64;
    let mut h_acc = h;
    let mut err_acc = 1e-2;

    let mut jac = system.jacobian(t, &y);
    stats.jacobian_evaluations += 1;
    let mut jac_current = true;
    let mut factors: Option<Factors<N>> = None;
    let mut factors_h = f64::NAN;

    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(fail(t, "maximum number of steps exceeded"));
        }
        if 0.1 * h.abs() <= t.abs() * uround || !h.is_finite() {
            return Err(fail(t, "step size underflow"));
        }
        if t + h * 1.0001 - t_end >= 0.0 {
            h = t_end - t;
            last = true;
        }

        if !jac_current {
            jac = system.jacobian(t, &y);
            stats.jacobian_evaluations += 1;
            jac_current = true;
        }
        if factors.is_none() || factors_h != h {
            match factorize(&jac, h) {
                Some(f) => {
                    factors = Some(f);
                    factors_h = h;
                    stats.decompositions += 1;
                }
                None => {
                    h *= 0.5;
                    reject = true;
                    last = false;
                    factors = None;
                    continue;
                }
            }
        }
        let lu = factors.as_ref().expect("factorized above");

        // starting values for the Newton iteration
        let (mut z1, mut z2, mut z3);
        if first {
            z1 = SVector::<f64, N>::zeros();
            z2 = z1;
            z3 = z1;
        } else {
            let c3q = h / h_old;
            let c1q = C1 * c3q;
            let c2q = C2 * c3q;
            let extrapolate =
                |cq: f64| (cont[0] + (cont[1] + cont[2] * (cq - C1M1)) * (cq - C2M1)) * cq;
            z1 = extrapolate(c1q);
            z2 = extrapolate(c2q);
            z3 = extrapolate(c3q);
        }
        let mut w1 = z1 * TI[0][0] + z2 * TI[0][1] + z3 * TI[0][2];
        let mut w2 = z1 * TI[1][0] + z2 * TI[1][1] + z3 * TI[1][2];
        let mut w3 = z1 * TI[2][0] + z2 * TI[2][1] + z3 * TI[2][2];

        // simplified Newton iteration
        let fac1 = GAMMA / h;
        let alphn = ALPHA / h;
        let betan = BETA / h;
        faccon = faccon.max(uround).powf(0.8);
        theta = theta.abs();
        let mut dyno_old = 0.0;
        let mut thq_old = 0.0;
        let mut newt = 0usize;
        let mut diverged: Option<f64> = None;
        loop {
            if newt >= MAX_NEWTON {
                diverged = Some(0.5);
                break;
            }
            let k1 = system.rhs(t + C1 * h, &(y + z1));
            let k2 = system.rhs(t + C2 * h, &(y + z2));
            let k3 = system.rhs(t + h, &(y + z3));
            stats.rhs_evaluations += 3;
            if !(k1.iter().chain(k2.iter()).chain(k3.iter()).all(|v| v.is_finite())) {
                diverged = Some(0.5);
                break;
            }
            let a1 = k1 * TI[0][0] + k2 * TI[0][1] + k3 * TI[0][2];
            let a2 = k1 * TI[1][0] + k2 * TI[1][1] + k3 * TI[1][2];
            let a3 = k1 * TI[2][0] + k2 * TI[2][1] + k3 * TI[2][2];
            let r1 = a1 - w1 * fac1;
            let r2 = a2 - w2 * alphn + w3 * betan;
            let r3 = a3 - w3 * alphn - w2 * betan;
            let d1 = lu.real.solve(&r1);
            let rc = SVector::<Complex64, N>::from_fn(|i, _| Complex64::new(r2[i], r3[i]));
            let dc = lu.complex.solve(&rc);
            let d2 = dc.map(|c| c.re);
            let d3 = dc.map(|c| c.im);
            newt += 1;

            let dyno = ((d1.component_div(&scale).norm_squared()
                + d2.component_div(&scale).norm_squared()
                + d3.component_div(&scale).norm_squared())
                / (3 * N) as f64)
                .sqrt();

            if newt > 1 && newt < MAX_NEWTON {
                let thq = dyno / dyno_old;
                theta = if newt == 2 { thq } else { (thq * thq_old).sqrt() };
                thq_old = thq;
                if theta < 0.99 {
                    faccon = theta / (1.0 - theta);
                    let dyth = faccon * dyno * theta.powi((MAX_NEWTON - 1 - newt) as i32) / fnewt;
                    if dyth >= 1.0 {
                        let qnewt = dyth.clamp(1e-4, 20.0);
                        let hhfac =
                            0.8 * qnewt.powf(-1.0 / (4 + MAX_NEWTON - 1 - newt) as f64);
                        diverged = Some(hhfac);
                        break;
                    }
                } else {
                    diverged = Some(0.5);
                    break;
                }
            }
            dyno_old = dyno.max(uround);

            w1 += d1;
            w2 += d2;
            w3 += d3;
            z1 = w1 * T[0][0] + w2 * T[0][1] + w3 * T[0][2];
            z2 = w1 * T[1][0] + w2 * T[1][1] + w3 * T[1][2];
            z3 = w1 * T[2][0] + w2;

            if faccon * dyno <= fnewt {
                break;
            }
        }

        if let Some(hhfac) = diverged {
            h *= hhfac;
            reject = true;
            last = false;
            // Jacobian at (t, y) is still valid; only the LU must be redone
            factors = None;
            continue;
        }

        // error estimate
        let ez = (z1 * E1 + z2 * E2 + z3 * E3) * fac1;
        let mut err_vec = lu.real.solve(&(f0 + ez));
        let mut err = rms(&err_vec, &scale).max(1e-10);
        if err >= 1.0 && (first || reject) {
            let f_pert = system.rhs(t, &(y + err_vec));
            stats.rhs_evaluations += 1;
            err_vec = lu.real.solve(&(f_pert + ez));
            err = rms(&err_vec, &scale).max(1e-10);
        }

        let fac = SAFETY.min(SAFETY * (1 + 2 * MAX_NEWTON) as f64 / (newt + 2 * MAX_NEWTON) as f64);
        let mut quot = FAC_MIN.max(FAC_MAX.min(err.powf(0.25) / fac));
        let mut h_new = h / quot;

        if err < 1.0 {
            // accepted
            stats.accepted += 1;
            if !first {
                let facgus = (h_acc / h) * (err * err / err_acc).powf(0.25) / SAFETY;
                let facgus = FAC_MIN.max(FAC_MAX.min(facgus));
                quot = quot.max(facgus);
                h_new = h / quot;
            }
            h_acc = h;
            err_acc = err.max(1e-2);
            first = false;

            let t_new = t + h;
            let y_new = y + z3;
            let ak = (z1 - z2) / C1MC2;
            cont[0] = (z2 - z3) / C2M1;
            cont[1] = (ak - cont[0]) / C1M1;
            cont[2] = cont[1] - (ak - z1 / C1) / C2;
            h_old = h;

            loop {
                let tg = grid_time(next_output);
                if tg > t_new || tg > t_end + 1e-9 * grid_step {
                    break;
                }
                let s = (tg - t_new) / h;
                let yg = y_new + (cont[0] + (cont[1] + cont[2] * (s - C1M1)) * (s - C2M1)) * s;
                observer(tg, &yg);
                next_output += 1;
            }

            t = t_new;
            y = y_new;
            system.project(&mut y);
            if !y.iter().all(|v| v.is_finite()) {
                return Err(fail(t, "solution became non-finite"));
            }
            if last {
                let last_grid = grid_time(next_output - 1);
                if t_end - last_grid > 1e-9 * grid_step {
                    observer(t_end, &y);
                }
                return Ok((y, stats));
            }

            scale = y.map(|v| atol + rtol * v.abs());
            f0 = system.rhs(t, &y);
            stats.rhs_evaluations += 1;

            h_new = h_new.min(settings.max_step);
            if reject {
                h_new = h_new.min(h);
            }
            reject = false;

            let ratio = h_new / h;
            if theta <= JACOBIAN_REUSE_THETA && (KEEP_STEP_LOW..=KEEP_STEP_HIGH).contains(&ratio) {
                // keep h, the Jacobian and its factorization
                continue;
            }
            h = h_new;
            jac_current = theta <= JACOBIAN_REUSE_THETA;
            factors = None;
        } else {
            // rejected
            reject = true;
            last = false;
            if first {
                h *= 0.1;
            } else {
                h = h_new;
            }
            if stats.accepted >= 1 {
                stats.rejected += 1;
            }
            factors = None;
        }
    }
}
