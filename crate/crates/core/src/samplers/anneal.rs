//! Metropolis simulated annealing with a geometric inverse-temperature ramp.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::model::{SpinConfig, SpinModel};
use crate::rng::read_rng;

use super::schedule::BetaSchedule;
use super::{Sample, SamplerError};

#[derive(Debug, Clone, PartialEq)]
pub struct SaParams {
    /// Full-lattice Metropolis passes per read.
    pub sweeps: usize,
    pub betas: BetaSchedule,
    /// Visit sites in a random order each sweep instead of sequentially.
    pub randomized_order: bool,
}

pub const DEFAULT_SWEEPS: usize = 500;

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            sweeps: DEFAULT_SWEEPS,
            betas: BetaSchedule::default(),
            randomized_order: false,
        }
    }
}

/// One Metropolis pass over every site at fixed inverse temperature.
///
/// A flip of spin i changes the energy by `-2 s_i local_field(i)`; moves with
/// nonpositive cost are always accepted (so zero-cost moves keep exploring a
/// degenerate manifold), others with probability `exp(-beta dE)`.
pub fn metropolis_sweep(
    model: &SpinModel,
    config: &mut SpinConfig,
    beta: f64,
    rng: &mut ChaCha8Rng,
    randomized_order: bool,
) {
    let n = model.num_spins();
    if randomized_order {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        for &i in &order {
            metropolis_step(model, config, beta, rng, i);
        }
    } else {
        for i in 0..n {
            metropolis_step(model, config, beta, rng, i);
        }
    }
}

#[inline]
fn metropolis_step(
    model: &SpinModel,
    config: &mut SpinConfig,
    beta: f64,
    rng: &mut ChaCha8Rng,
    i: usize,
) {
    let spins = config.spins();
    let delta = -2.0 * spins[i] as f64 * model.local_field_unchecked(spins, i);
    if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
        config.flip(i);
    }
}

pub fn random_config(n: usize, rng: &mut ChaCha8Rng) -> SpinConfig {
    let spins: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    SpinConfig::from_spins(spins).expect("generated spins are +-1")
}

/// Independent annealing reads; read r draws from RNG stream r of the base
/// seed, so results are identical for a fixed seed no matter how reads are
/// scheduled across workers.
pub fn simulated_anneal(
    model: &SpinModel,
    params: &SaParams,
    reads: usize,
    seed: u64,
) -> Result<Vec<Sample>, SamplerError> {
    if reads == 0 {
        return Err(SamplerError::ZeroReads);
    }
    if params.sweeps == 0 {
        return Err(SamplerError::ZeroSweeps);
    }
    let samples: Vec<Sample> = (0..reads as u64)
        .into_par_iter()
        .map(|read| {
            let mut rng = read_rng(seed, read);
            let mut config = random_config(model.num_spins(), &mut rng);
            for t in 0..params.sweeps {
                let beta = params.betas.at(t, params.sweeps);
                metropolis_sweep(model, &mut config, beta, &mut rng, params.randomized_order);
            }
            let energy = model.energy(&config).expect("config built for this model");
            Sample { config, energy, seed: read, chain_breaks: None }
        })
        .collect();
    Ok(samples)
}
