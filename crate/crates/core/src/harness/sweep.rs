use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::config::SweepConfig;
use super::metrics::{r_squared, ReferenceDataset};
use crate::analytic::{coefficients, w_analytic};
use crate::collapse::{AtomOutcome, Branch, FlipFraction};
use crate::constants::PhysicalConstants;
use crate::dynamics::{chamber_entry_state, integrate_in_field};
use crate::field::QuadrupolePath;
use crate::sampling::{sample_post_sg1, RandomStream};
use crate::{Error, Result};

/// Share of atoms allowed to fail before a row is flagged.
pub const FAILURE_THRESHOLD: f64 = 1e-3;

/// Sample, integrate and branch atom `atom` at wire current `current`.
pub fn simulate_atom(
    config: &SweepConfig,
    constants: &PhysicalConstants,
    current: f64,
    atom: u64,
) -> Result<AtomOutcome> {
    let mut stream = RandomStream::for_current(config.seed, current, atom);
    let (theta_n, phi_n) = sample_post_sg1(&mut stream);
    let phi_e = TAU * stream.uniform();
    let init = chamber_entry_state(phi_e, theta_n, phi_n);
    let path = QuadrupolePath::new(current, &config.geometry)?;
    let half = config.geometry.half_transit_time();
    let traj = integrate_in_field(
        &init,
        &path,
        -half,
        half,
        &constants.hyperfine_fields(),
        constants,
        &config.ode,
        config.averaging_window,
    )?;
    AtomOutcome::new(traj.theta_e_final, traj.theta_n0)
}

/// Aggregated outcome at one wire current.
#[derive(Debug, Clone, PartialEq)]
pub struct CurrentRow {
    pub current: f64,
    /// `None` when every atom failed.
    pub flip: Option<FlipFraction>,
    pub w_analytic: f64,
    pub requested: usize,
    pub failures: usize,
    /// Atoms whose final angle equalled θ_n0 exactly.
    pub ties: usize,
    pub first_failure: Option<String>,
}

impl CurrentRow {
    /// More than [`FAILURE_THRESHOLD`] of the atoms failed to integrate.
    pub fn failed(&self) -> bool {
        self.flip.is_none() || self.failures as f64 > FAILURE_THRESHOLD * self.requested as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RSquared {
    pub numerical: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<CurrentRow>,
    pub r_squared: Option<RSquared>,
    pub wall_time: Duration,
}

impl SweepResult {
    pub fn any_failed(&self) -> bool {
        self.rows.iter().any(CurrentRow::failed)
    }

    /// Compare against measured fractions taken at exactly the sweep currents.
    pub fn attach_reference(&mut self, data: &ReferenceDataset) -> Result<RSquared> {
        if self.any_failed() {
            return Err(Error::domain("cannot score a sweep with failed rows"));
        }
        let num: Vec<(f64, f64)> = self
            .rows
            .iter()
            .map(|r| (r.current, r.flip.as_ref().map_or(f64::NAN, |f| f.value)))
            .collect();
        let ana: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.current, r.w_analytic)).collect();
        let scores = RSquared {
            numerical: r_squared(&num, data)?,
            analytic: r_squared(&ana, data)?,
        };
        self.r_squared = Some(scores);
        Ok(scores)
    }
}

enum AtomResult {
    Done(Branch, bool),
    Failed(String),
}

/// Run the ensemble for every current using `workers` threads. Output does
/// not depend on `workers`.
pub fn run_sweep(config: &SweepConfig, workers: usize) -> Result<SweepResult> {
    config.validate()?;
    let constants = PhysicalConstants::potassium39();
    let coeffs = coefficients(&config.geometry, &constants, &constants.hyperfine_fields())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;

    let started = Instant::now();
    let n = config.atoms_per_current;
    let mut rows = Vec::with_capacity(config.currents.len());
    for &current in &config.currents {
        let outcomes: Vec<AtomResult> = pool.install(|| {
            (0..n as u64)
                .into_par_iter()
                .map(|atom| match simulate_atom(config, &constants, current, atom) {
                    Ok(o) => AtomResult::Done(o.branch, o.theta_e_final == o.theta_n0),
                    Err(e) => AtomResult::Failed(format!("atom {atom}: {e}")),
                })
                .collect()
        });
        let row = aggregate(current, n, &outcomes, w_analytic(current, &coeffs)?)?;
        if row.failures > 0 {
            log::warn!(
                "{current} A: {} of {n} atoms failed ({})",
                row.failures,
                row.first_failure.as_deref().unwrap_or("")
            );
        }
        log::info!(
            "{current:.6} A: W_num = {} W_ana = {:.4}",
            row.flip.as_ref().map_or("n/a".to_string(), |f| format!("{:.4}", f.value)),
            row.w_analytic
        );
        rows.push(row);
    }
    Ok(SweepResult {
        config: config.clone(),
        rows,
        r_squared: None,
        wall_time: started.elapsed(),
    })
}

fn aggregate(current: f64, requested: usize, outcomes: &[AtomResult], w_ana: f64) -> Result<CurrentRow> {
    let (mut flipped, mut done, mut ties, mut failures) = (0, 0, 0, 0);
    let mut first_failure = None;
    for o in outcomes {
        match o {
            AtomResult::Done(b, tie) => {
                done += 1;
                flipped += usize::from(*b == Branch::Flipped);
                ties += usize::from(*tie);
            }
            AtomResult::Failed(msg) => {
                failures += 1;
                first_failure.get_or_insert_with(|| msg.clone());
            }
        }
    }
    Ok(CurrentRow {
        current,
        flip: if done > 0 {
            Some(FlipFraction::from_counts(flipped, done)?)
        } else {
            None
        },
        w_analytic: w_ana,
        requested,
        failures,
        ties,
        first_failure,
    })
}
