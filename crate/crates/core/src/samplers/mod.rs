//! Low-energy configuration sampling: exact enumeration, classical annealing,
//! and path-integral quantum annealing behind one dispatch front-end.

mod anneal;
mod exact;
mod quantum;
mod schedule;

pub use anneal::{metropolis_sweep, random_config, simulated_anneal, SaParams, DEFAULT_SWEEPS};
pub use exact::{exact_ground, ExactGround, DEGENERACY_TOL, MAX_EXACT_SITES};
pub use quantum::{
    simulated_quantum_anneal, SqaParams, DEFAULT_BETA, DEFAULT_SLICES, TANH_CLAMP,
};
pub use schedule::{
    AnnealSchedule, BetaSchedule, ScheduleError, DEFAULT_GAMMA0, DEFAULT_STEPS,
};

use thiserror::Error;

use crate::model::{ChainEmbedding, LatticeParams, ModelError, SpinConfig, SpinModel};

pub const DEFAULT_READS: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum SamplerError {
    #[error("exact enumeration supports at most {max} sites, got {sites}")]
    TooManySites { sites: usize, max: usize },
    #[error("reads must be at least 1")]
    ZeroReads,
    #[error("sweeps must be at least 1")]
    ZeroSweeps,
    #[error("quantum annealing needs at least 2 replicas, got {0}")]
    TooFewSlices(usize),
    #[error("inverse temperature must be positive and finite, got {0}")]
    BadBeta(f64),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One read: a configuration, its exact energy, the RNG stream that produced
/// it, and the chain-break count when the read went through an embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub config: SpinConfig,
    pub energy: f64,
    pub seed: u64,
    pub chain_breaks: Option<u32>,
}

/// Which engine produced a sample set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Exact,
    Anneal,
    QuantumAnneal,
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EngineKind::Exact => write!(f, "exact"),
            EngineKind::Anneal => write!(f, "sa"),
            EngineKind::QuantumAnneal => write!(f, "sqa"),
        }
    }
}

/// Run parameters echoed alongside the samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMeta {
    pub engine: EngineKind,
    pub reads: usize,
    pub seed: u64,
    pub lattice: Option<LatticeParams>,
    pub embedded: bool,
    /// Human-readable echo of the engine schedule.
    pub schedule: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub meta: SampleMeta,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn min_energy(&self) -> f64 {
        self.samples.iter().map(|s| s.energy).fold(f64::INFINITY, f64::min)
    }

    /// Fraction of reads with at least one broken chain; None when the set
    /// was not produced through an embedding.
    pub fn chain_break_rate(&self) -> Option<f64> {
        let broken: u32 = self
            .samples
            .iter()
            .map(|s| s.chain_breaks.map(|b| (b > 0) as u32))
            .collect::<Option<Vec<u32>>>()?
            .iter()
            .sum();
        Some(broken as f64 / self.samples.len() as f64)
    }

    /// Samples whose energy is within `DEGENERACY_TOL` of the set minimum.
    pub fn lowest_energy_samples(&self) -> Vec<&Sample> {
        let min = self.min_energy();
        self.samples.iter().filter(|s| s.energy <= min + DEGENERACY_TOL).collect()
    }
}

/// Engine selection with per-engine parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineSpec {
    Exact,
    Anneal(SaParams),
    QuantumAnneal(SqaParams),
}

impl EngineSpec {
    fn kind(&self) -> EngineKind {
        match self {
            EngineSpec::Exact => EngineKind::Exact,
            EngineSpec::Anneal(_) => EngineKind::Anneal,
            EngineSpec::QuantumAnneal(_) => EngineKind::QuantumAnneal,
        }
    }

    fn schedule_echo(&self) -> String {
        match self {
            EngineSpec::Exact => "exhaustive".to_string(),
            EngineSpec::Anneal(p) => format!(
                "beta {} -> {} geometric, {} sweeps",
                p.betas.start(),
                p.betas.end(),
                p.sweeps
            ),
            EngineSpec::QuantumAnneal(p) => format!(
                "P = {}, beta = {}, gamma {} -> 0 over {} steps",
                p.slices,
                p.beta,
                p.schedule.gamma0(),
                p.schedule.steps()
            ),
        }
    }
}

/// Full sampling request: engine, read count, base seed, and the optional
/// chain embedding (the value is the intra-chain coupling).
#[derive(Debug, Clone, PartialEq)]
pub struct SamplerSpec {
    pub engine: EngineSpec,
    pub reads: usize,
    pub seed: u64,
    pub embedding: Option<f64>,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        SamplerSpec {
            engine: EngineSpec::Anneal(SaParams::default()),
            reads: DEFAULT_READS,
            seed: 1,
            embedding: None,
        }
    }
}

/// Uniform front-end over the three engines.
///
/// With an embedding active, the engine runs on the 3x physical model and
/// every physical read is majority-vote decoded; energies always refer to the
/// logical model and are recomputed on insertion.
pub fn sample(model: &SpinModel, spec: &SamplerSpec) -> Result<SampleSet, SamplerError> {
    let (run_model, embedding) = match spec.embedding {
        Some(chain_coupling) => {
            let (physical, emb) = model.embed(chain_coupling);
            (physical, Some(emb))
        }
        None => (model.clone(), None),
    };

    let raw: Vec<Sample> = match &spec.engine {
        EngineSpec::Exact => {
            let ground = exact_ground(&run_model)?;
            ground
                .configs
                .into_iter()
                .enumerate()
                .map(|(k, config)| Sample {
                    energy: ground.energy,
                    config,
                    seed: k as u64,
                    chain_breaks: None,
                })
                .collect()
        }
        EngineSpec::Anneal(params) => simulated_anneal(&run_model, params, spec.reads, spec.seed)?,
        EngineSpec::QuantumAnneal(params) => {
            simulated_quantum_anneal(&run_model, params, spec.reads, spec.seed)?
        }
    };

    let samples = match &embedding {
        Some(emb) => decode_samples(model, emb, raw)?,
        None => raw,
    };

    let meta = SampleMeta {
        engine: spec.engine.kind(),
        reads: samples.len(),
        seed: spec.seed,
        lattice: model.lattice_params(),
        embedded: embedding.is_some(),
        schedule: spec.engine.schedule_echo(),
    };
    Ok(SampleSet { samples, meta })
}

fn decode_samples(
    logical: &SpinModel,
    emb: &ChainEmbedding,
    raw: Vec<Sample>,
) -> Result<Vec<Sample>, SamplerError> {
    raw.into_iter()
        .map(|s| {
            let (config, breaks) = emb.decode(&s.config)?;
            let energy = logical.energy(&config)?;
            Ok(Sample { config, energy, seed: s.seed, chain_breaks: Some(breaks) })
        })
        .collect()
}
