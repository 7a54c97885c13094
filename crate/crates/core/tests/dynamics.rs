use std::f64::consts::PI;

use cqdsim::collapse::{branch, Branch};
use cqdsim::dynamics::{chamber_entry_state, integrate_atom, integrate_in_field, FullSystem};
use cqdsim::field::{null_point, QuadrupolePath};
use cqdsim::field::UniformField;
use cqdsim::ode::{solve, OdeSettings};
use cqdsim::sampling::sample_post_sg1;
use cqdsim::{ChamberGeometry, RandomStream, HyperfineFields, MomentState, PhysicalConstants};
use nalgebra::{SVector, Vector3};

fn unwrap(phases: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(phases.len());
    let mut offset = 0.0;
    for (i, &p) in phases.iter().enumerate() {
        if i > 0 {
            let jump = p - phases[i - 1];
            if jump > PI {
                offset -= 2.0 * PI;
            } else if jump < -PI {
                offset += 2.0 * PI;
            }
        }
        out.push(p + offset);
    }
    out
}

#[test]
fn larmor_precession_phase() {
    let c = PhysicalConstants::potassium39();
    let b = 42e-6;
    let field = UniformField(Vector3::new(0.0, 0.0, b));
    let init = MomentState::from_angles(PI / 2.0, 0.25, PI / 2.0, 0.0);
    let settings = OdeSettings::default();
    let traj = integrate_in_field(
        &init,
        &field,
        0.0,
        10e-6,
        &HyperfineFields::OFF,
        &c,
        &settings,
        1e-6,
    )
    .unwrap();
    let phase = unwrap(&traj.phi_e);
    let omega = -c.gamma_e * b;
    let total = omega * 10e-6;
    let mut worst = 0.0f64;
    for (t, p) in traj.times.iter().zip(&phase) {
        let exact = 0.25 + omega * t;
        worst = worst.max((p - exact).abs());
    }
    let rel = worst / total;
    println!("precession: worst phase error {worst:e} rad, relative {rel:e}");
    assert!(rel < 1e-8);
    assert!(traj.theta_e.iter().all(|t| (t - PI / 2.0).abs() < 1e-8));
}

#[test]
fn coupled_free_precession_conserves_total_moment() {
    let c = PhysicalConstants::potassium39();
    let hf = c.hyperfine_fields();
    let field = UniformField(Vector3::zeros());
    let system = FullSystem::new(&field, &hf, &c);
    let s = MomentState::from_angles(2.0, 0.3, 5.0 * PI / 8.0, 1.1);
    let y0 = SVector::<f64, 6>::from_iterator(s.electron.iter().chain(s.nucleus.iter()).copied());
    let sigma = |y: &SVector<f64, 6>| {
        Vector3::new(y[0], y[1], y[2]) * (c.mu_e / c.gamma_e)
            + Vector3::new(y[3], y[4], y[5]) * (c.mu_n / c.gamma_n)
    };
    let sigma0 = sigma(&y0);
    let settings = OdeSettings {
        rel_tol: 1e-11,
        abs_tol: 1e-11,
        max_step: 1e-9,
        dense_output_step: 1e-9,
    };
    let mut worst = 0.0f64;
    let (_, stats) = solve(&system, 0.0, y0, 1e-6, &settings, |_, y| {
        worst = worst.max((sigma(y) - sigma0).norm() / sigma0.norm());
    })
    .unwrap();
    println!("sigma drift {worst:e} over {} steps", stats.accepted);
    assert!(worst < 1e-9);
}

fn fig4_state() -> MomentState {
    chamber_entry_state(0.0, 5.0 * PI / 8.0, 11.0 * PI / 10.0)
}

fn log_grid(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (0.01f64.ln() + (50f64).ln() * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[test]
fn halving_rel_tol_barely_moves_final_angle() {
    let c = PhysicalConstants::potassium39();
    let g = ChamberGeometry::frisch_segre();
    let loose = OdeSettings::default();
    let tight = OdeSettings {
        rel_tol: loose.rel_tol / 2.0,
        ..loose
    };
    let mut worst = 0.0f64;
    for current in log_grid(25) {
        let a = integrate_atom(&fig4_state(), current, &g, &c, &loose).unwrap();
        let b = integrate_atom(&fig4_state(), current, &g, &c, &tight).unwrap();
        worst = worst.max((a.theta_e_final - b.theta_e_final).abs());
        assert!(a.norm_drift < 1e-6, "norm drift {} at {current} A", a.norm_drift);
    }
    println!("max |delta theta_e_final| under halved rel_tol: {worst:e}");
    assert!(worst < 1e-3);
}

#[test]
fn null_point_beyond_exit_gives_no_reversal() {
    let c = PhysicalConstants::potassium39();
    let g = ChamberGeometry::frisch_segre();
    let s = OdeSettings::default();
    let half = g.half_transit_time();
    for current in [20.0, 50.0] {
        assert!(null_point(current, &g).unwrap().time > half);
        let path = QuadrupolePath::new(current, &g).unwrap();
        // without the hyperfine field the moment just follows the slightly
        // tilted external field
        let bare = integrate_in_field(&fig4_state(), &path, -half, half, &HyperfineFields::OFF, &c, &s, 2e-6)
            .unwrap();
        let dev = bare.theta_e.iter().map(|t| PI - t).fold(0.0, f64::max);
        assert!(dev < 1e-2, "{current} A: max deviation {dev}");
        // the nuclear field tilts the precession axis but never reverses it
        let traj = integrate_atom(&fig4_state(), current, &g, &c, &s).unwrap();
        println!("{current} A: theta_e_final = {:.4}", traj.theta_e_final);
        assert!(traj.theta_e.iter().all(|&t| t > 0.75 * PI));
        assert_eq!(branch(traj.theta_e_final, traj.theta_n0).unwrap(), Branch::Flipped);
    }
}

fn flip_fraction_from(
    current: f64,
    atoms: u64,
    start: impl Fn(f64) -> f64,
) -> f64 {
    let c = PhysicalConstants::potassium39();
    let g = ChamberGeometry::frisch_segre();
    let hf = c.hyperfine_fields();
    let s = OdeSettings::default();
    let path = QuadrupolePath::new(current, &g).unwrap();
    let t_np = null_point(current, &g).unwrap().time;
    let mut flipped = 0;
    for atom in 0..atoms {
        let mut rng = RandomStream::for_current(7, current, atom);
        let (theta_n, phi_n) = sample_post_sg1(&mut rng);
        let phi_e = 2.0 * PI * rng.uniform();
        let init = chamber_entry_state(phi_e, theta_n, phi_n);
        let traj =
            integrate_in_field(&init, &path, start(t_np), g.half_transit_time(), &hf, &c, &s, 2e-6).unwrap();
        if branch(traj.theta_e_final, theta_n).unwrap() == Branch::Flipped {
            flipped += 1;
        }
    }
    flipped as f64 / atoms as f64
}

#[test]
fn late_start_sensitivity() {
    // Single trajectories depend on where the integration starts because the
    // precession phase at the null point does; the ensemble fraction should not.
    let g = ChamberGeometry::frisch_segre();
    let n = 400;
    for current in [0.05, 0.2] {
        let full = flip_fraction_from(current, n, |_| -g.half_transit_time());
        let late = flip_fraction_from(current, n, |t_np| t_np - 3e-6);
        let se = (2.0 * full * (1.0 - full) / n as f64).sqrt().max(1.0 / n as f64);
        println!("{current} A: W full {full:.4} late start {late:.4}, 4 se = {:.4}", 4.0 * se);
        assert!((full - late).abs() < 4.0 * se);
    }
}
