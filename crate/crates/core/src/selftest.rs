//! Built-in oracle suite behind the `verify` subcommand: exact enumeration
//! against the stochastic engines at small size, plus embedding and
//! consistency spot checks.

use rand::Rng;

use crate::lattice::Lattice;
use crate::model::{SpinConfig, SpinModel, DEFAULT_CHAIN_COUPLING};
use crate::rng::read_rng;
use crate::samplers::{
    exact_ground, sample, AnnealSchedule, EngineSpec, SaParams, SamplerSpec, SqaParams,
};
use crate::Error;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check { name: name.to_string(), passed, detail }
}

/// Run the oracle suite; every check compares a sampler or identity against
/// an independently enumerated ground truth.
pub fn run() -> Result<Vec<Check>, Error> {
    let mut checks = Vec::new();

    // Triangle ground manifold by exhaustive scan.
    let triangle = SpinModel::triangle(0.6, 0.6, 0.0);
    let ground = exact_ground(&triangle)?;
    checks.push(check(
        "triangle exact ground",
        (ground.energy - (-0.6)).abs() < 1e-12 && ground.degeneracy == 6,
        format!("E0 = {}, degeneracy = {}", ground.energy, ground.degeneracy),
    ));

    // Pure Lieb lattice at L=1: a two-fold staggered ground state.
    let lat = Lattice::new(1)?;
    let lieb = SpinModel::from_lattice(&lat, 0.6, 0.0, 0.0)?;
    let lieb_ground = exact_ground(&lieb)?;
    checks.push(check(
        "lieb L=1 exact ground",
        (lieb_ground.energy - (-4.8)).abs() < 1e-12 && lieb_ground.degeneracy == 2,
        format!("E0 = {}, degeneracy = {}", lieb_ground.energy, lieb_ground.degeneracy),
    ));

    // Classical annealing matches the oracle on a random L=1 model.
    let mut rng = read_rng(2024, 0);
    let model = SpinModel::from_lattice(
        &lat,
        rng.gen_range(0.3..1.0),
        rng.gen_range(0.3..1.7),
        rng.gen_range(0.0..0.6),
    )?;
    let oracle = exact_ground(&model)?;
    let sa_set = sample(
        &model,
        &SamplerSpec {
            engine: EngineSpec::Anneal(SaParams { sweeps: 300, ..Default::default() }),
            reads: 200,
            seed: 31,
            embedding: None,
        },
    )?;
    checks.push(check(
        "sa reaches exact ground (random L=1 model)",
        (sa_set.min_energy() - oracle.energy).abs() < 1e-9,
        format!("sa min = {}, exact = {}", sa_set.min_energy(), oracle.energy),
    ));

    // Quantum annealing surrogate matches the oracle on the same model.
    let sqa_set = sample(
        &model,
        &SamplerSpec {
            engine: EngineSpec::QuantumAnneal(SqaParams {
                schedule: AnnealSchedule::linear(3.0, 500)?,
                ..Default::default()
            }),
            reads: 50,
            seed: 32,
            embedding: None,
        },
    )?;
    checks.push(check(
        "sqa reaches exact ground (random L=1 model)",
        (sqa_set.min_energy() - oracle.energy).abs() < 1e-9,
        format!("sqa min = {}, exact = {}", sqa_set.min_energy(), oracle.energy),
    ));

    // Embedded annealing decodes to the logical ground.
    let emb_set = sample(
        &triangle,
        &SamplerSpec {
            engine: EngineSpec::Anneal(SaParams { sweeps: 300, ..Default::default() }),
            reads: 200,
            seed: 33,
            embedding: Some(DEFAULT_CHAIN_COUPLING),
        },
    )?;
    let break_rate = emb_set.chain_break_rate().unwrap_or(1.0);
    checks.push(check(
        "embedded sa decodes to logical ground",
        (emb_set.min_energy() - ground.energy).abs() < 1e-9 && break_rate < 0.05,
        format!("decoded min = {}, break rate = {break_rate:.4}", emb_set.min_energy()),
    ));

    // Single-flip energy differences agree with the closed form.
    let mut flip_ok = true;
    let probe = SpinModel::from_lattice(&lat, 0.6, 0.8, 0.2)?;
    for trial in 0..200 {
        let mut trng = read_rng(77, trial);
        let spins: Vec<i8> =
            (0..probe.num_spins()).map(|_| if trng.gen::<bool>() { 1 } else { -1 }).collect();
        let config = SpinConfig::from_spins(spins)?;
        let i = trng.gen_range(0..probe.num_spins());
        let lhs = probe.energy(&config.flipped(i))? - probe.energy(&config)?;
        let rhs = -2.0 * config.spins()[i] as f64 * probe.local_field(&config, i)?;
        if (lhs - rhs).abs() > 1e-12 {
            flip_ok = false;
            break;
        }
    }
    checks.push(check(
        "single-flip energy identity",
        flip_ok,
        "energy(flip) - energy == -2 s_i local_field(i)".to_string(),
    ));

    Ok(checks)
}
