//! Branching at the second Stern–Gerlach stage and flip-fraction statistics.

use std::f64::consts::PI;

use crate::{Error, Result};

/// Electron orientation measured at SG2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// θ_e,D = 0: no flip.
    Up = 0,
    /// θ_e,D = π: spin flip.
    Flipped = 1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomOutcome {
    pub theta_e_final: f64,
    pub theta_n0: f64,
    pub branch: Branch,
}

impl AtomOutcome {
    pub fn new(theta_e_final: f64, theta_n0: f64) -> Result<Self> {
        Ok(Self {
            theta_e_final,
            theta_n0,
            branch: branch(theta_e_final, theta_n0)?,
        })
    }
}

/// The electron collapses to π when its final polar angle exceeds the
/// nuclear polar angle and to 0 when it is smaller. Equality counts as a flip.
pub fn branch(theta_e_final: f64, theta_n0: f64) -> Result<Branch> {
    for (name, angle) in [("theta_e_final", theta_e_final), ("theta_n0", theta_n0)] {
        if !(0.0..=PI).contains(&angle) {
            return Err(Error::domain(format!("{name} = {angle} outside [0, π]")));
        }
    }
    Ok(if theta_e_final < theta_n0 {
        Branch::Up
    } else {
        Branch::Flipped
    })
}

/// Fraction of flipped atoms with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlipFraction {
    pub value: f64,
    pub std_error: f64,
    pub atoms: usize,
}

impl FlipFraction {
    pub fn from_counts(flipped: usize, atoms: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::domain("flip fraction of an empty ensemble"));
        }
        if flipped > atoms {
            return Err(Error::domain("more flipped atoms than atoms"));
        }
        let n = atoms as f64;
        let value = flipped as f64 / n;
        Ok(Self {
            value,
            std_error: (value * (1.0 - value) / n).sqrt(),
            atoms,
        })
    }
}

pub fn flip_fraction(outcomes: &[AtomOutcome]) -> Result<FlipFraction> {
    let flipped = outcomes
        .iter()
        .filter(|o| o.branch == Branch::Flipped)
        .count();
    FlipFraction::from_counts(flipped, outcomes.len())
}
