//! Path-integral (Suzuki-Trotter) simulated quantum annealing.
//!
//! The transverse-field model is mapped onto P coupled replicas of the
//! classical system. At annealing parameter s, intra-replica couplings and
//! fields are scaled by `classical(s) / P`, while same-site spins in adjacent
//! replicas (periodic in the replica index) are bound ferromagnetically with
//! strength `J_perp(s) = -ln(tanh(beta * transverse(s) / P)) / (2 beta)`.
//! As the transverse scale vanishes J_perp diverges and the replicas freeze
//! together; the tanh argument is clamped below at `TANH_CLAMP` to keep the
//! coupling finite.

use rand::Rng;
use rayon::prelude::*;

use crate::model::{SpinConfig, SpinModel};
use crate::rng::read_rng;

use super::anneal::random_config;
use super::schedule::AnnealSchedule;
use super::{Sample, SamplerError};

/// Lower clamp on the tanh argument when the transverse scale reaches zero.
pub const TANH_CLAMP: f64 = 1e-12;

/// Default number of Trotter replicas.
pub const DEFAULT_SLICES: usize = 8;

/// Default inverse temperature of the replica system. Chosen so the final
/// per-replica coupling `beta * J / P` sits well inside the ordered regime
/// for couplings around 0.5.
pub const DEFAULT_BETA: f64 = 32.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SqaParams {
    /// Trotter replicas (P >= 2).
    pub slices: usize,
    /// Inverse temperature of the extended system.
    pub beta: f64,
    pub schedule: AnnealSchedule,
}

impl Default for SqaParams {
    fn default() -> Self {
        SqaParams {
            slices: DEFAULT_SLICES,
            beta: DEFAULT_BETA,
            schedule: AnnealSchedule::default(),
        }
    }
}

fn replica_coupling(beta: f64, transverse: f64, slices: usize) -> f64 {
    let arg = (beta * transverse / slices as f64).max(TANH_CLAMP);
    -arg.tanh().ln() / (2.0 * beta)
}

/// Anneal `reads` independent replica stacks; each read reports the replica
/// with the lowest classical energy. Deterministic per (seed, read).
pub fn simulated_quantum_anneal(
    model: &SpinModel,
    params: &SqaParams,
    reads: usize,
    seed: u64,
) -> Result<Vec<Sample>, SamplerError> {
    if reads == 0 {
        return Err(SamplerError::ZeroReads);
    }
    if params.slices < 2 {
        return Err(SamplerError::TooFewSlices(params.slices));
    }
    if !(params.beta > 0.0 && params.beta.is_finite()) {
        return Err(SamplerError::BadBeta(params.beta));
    }

    let n = model.num_spins();
    let p = params.slices;
    let steps = params.schedule.steps();
    let beta = params.beta;

    let samples: Vec<Sample> = (0..reads as u64)
        .into_par_iter()
        .map(|read| {
            let mut rng = read_rng(seed, read);
            // Replica-major layout: replica k occupies [k*n, (k+1)*n).
            let mut spins: Vec<i8> = Vec::with_capacity(p * n);
            for _ in 0..p {
                spins.extend_from_slice(random_config(n, &mut rng).spins());
            }

            for t in 0..steps {
                let s = t as f64 / (steps - 1) as f64;
                let classical_scale = params.schedule.classical_at(s) / p as f64;
                let j_perp = replica_coupling(beta, params.schedule.transverse_at(s), p);
                for k in 0..p {
                    let up = (k + 1) % p;
                    let down = (k + p - 1) % p;
                    for i in 0..n {
                        let intra = model.local_field_unchecked(&spins[k * n..(k + 1) * n], i);
                        let inter = (spins[up * n + i] + spins[down * n + i]) as f64;
                        let local = classical_scale * intra - j_perp * inter;
                        let delta = -2.0 * spins[k * n + i] as f64 * local;
                        if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                            spins[k * n + i] = -spins[k * n + i];
                        }
                    }
                }
            }

            // Read out the replica with the lowest classical energy
            // (lowest replica index wins ties).
            let mut best: Option<(f64, SpinConfig)> = None;
            for k in 0..p {
                let config = SpinConfig::from_raw(spins[k * n..(k + 1) * n].to_vec());
                let energy = model.energy(&config).expect("replica matches model size");
                if best.as_ref().is_none_or(|(e, _)| energy < *e) {
                    best = Some((energy, config));
                }
            }
            let (energy, config) = best.expect("at least two replicas");
            Sample { config, energy, seed: read, chain_breaks: None }
        })
        .collect();
    Ok(samples)
}
