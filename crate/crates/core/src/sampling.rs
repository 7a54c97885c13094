//! Orientation sampling at the oven and after the first Stern–Gerlach stage.
//!
//! Every atom owns an independent ChaCha8 substream keyed by the run seed and
//! a per-current key, with the atom index selecting the ChaCha stream. Draws
//! for one atom therefore never depend on how atoms are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// Deterministic source of uniform variates in [0, 1) for one atom.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Substream `atom_index` of the generator keyed by `seed`.
    pub fn new(seed: u64, atom_index: u64) -> Self {
        Self::keyed(seed, 0, atom_index)
    }

    /// Substream for an atom simulated at wire current `current`. The key
    /// uses the current's value, not its position in a sweep, so adding or
    /// removing other currents leaves this stream unchanged.
    pub fn for_current(seed: u64, current: f64, atom_index: u64) -> Self {
        Self::keyed(seed, current.to_bits(), atom_index)
    }

    fn keyed(seed: u64, key: u64, atom_index: u64) -> Self {
        let mut state = seed ^ splitmix64(&mut key.wrapping_add(0x6a09_e667_f3bc_c909));
        let mut bytes = [0u8; 32];
        for chunk in bytes.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(bytes);
        rng.set_stream(atom_index);
        Self { rng }
    }

    /// Uniform ζ ∈ [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Which electron alignment SG1 selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sg1Branch {
    /// Electron moment along +z (θ_e,0 = 0).
    Up,
    /// Electron moment along -z (θ_e,0 = π).
    Down,
}

/// Isotropic angles from two uniform variates.
pub fn isotropic_angles(zeta1: f64, zeta2: f64) -> (f64, f64) {
    (2.0 * zeta1.sqrt().asin(), TAU * zeta2)
}

/// Uniform orientation on the sphere, as at the oven.
pub fn sample_isotropic(stream: &mut RandomStream) -> (f64, f64) {
    let z1 = stream.uniform();
    let z2 = stream.uniform();
    isotropic_angles(z1, z2)
}

/// Nuclear orientation density after SG1: (1 ∓ cos θ) / 4π, with the minus
/// sign for the branch whose electron points up.
pub fn post_sg1_pdf(polar: f64, branch: Sg1Branch) -> Result<f64> {
    if !(0.0..=PI).contains(&polar) {
        return Err(Error::domain(format!("polar angle {polar} outside [0, π]")));
    }
    let c = polar.cos();
    let density = match branch {
        Sg1Branch::Up => 1.0 - c,
        Sg1Branch::Down => 1.0 + c,
    };
    Ok(density / (4.0 * PI))
}

/// Inverse CDF of the up-branch density. P(θ ≤ x) = sin⁴(x / 2).
pub fn post_sg1_angles(zeta1: f64, zeta2: f64) -> (f64, f64) {
    (2.0 * zeta1.sqrt().sqrt().asin(), TAU * zeta2)
}

/// Nuclear orientation after SG1 for the selected (electron-up) branch.
pub fn sample_post_sg1(stream: &mut RandomStream) -> (f64, f64) {
    let z1 = stream.uniform();
    let z2 = stream.uniform();
    post_sg1_angles(z1, z2)
}

/// CDF of the up-branch polar angle.
pub fn post_sg1_cdf(polar: f64) -> f64 {
    (0.5 * polar).sin().powi(4)
}
