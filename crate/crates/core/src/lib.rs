//! Classical sampling study of Ising antiferromagnets on lattices that
//! interpolate between Lieb and kagome geometry.
//!
//! The depleted-square lattice carries two bond families: corner-edge
//! couplings J and anti-diagonal edge-edge couplings J'. Growing J' from
//! below J to above it drives the system from an unfrustrated staggered
//! antiferromagnet through a maximally frustrated kagome point into a
//! chain-dominated regime. Three interchangeable engines sample low-energy
//! states (exhaustive enumeration, Metropolis annealing, and path-integral
//! quantum annealing); observables reduce the reads to magnetization curves
//! and static structure-factor maps.

pub mod config;
pub mod lattice;
pub mod model;
pub mod observables;
pub mod output;
pub mod rng;
pub mod samplers;
pub mod selftest;
pub mod sweep;

pub use config::{ConfigError, EngineChoice, RunConfig};
pub use lattice::{Bond, BondClass, Lattice, LatticeError, Site, SiteRole};
pub use model::{
    ChainEmbedding, LatticeParams, ModelError, SpinConfig, SpinModel, CHAIN_LEN,
    DEFAULT_CHAIN_COUPLING,
};
pub use observables::{
    correlation, magnetization, structure_factor, structure_factor_at, MagnetizationStat,
    ObservableError, SqGrid, SqOptions, Zone,
};
pub use output::{Manifest, OutputError};
pub use samplers::{
    exact_ground, sample, simulated_anneal, simulated_quantum_anneal, AnnealSchedule,
    BetaSchedule, EngineKind, EngineSpec, ExactGround, SaParams, Sample, SampleMeta, SampleSet,
    SamplerError, SamplerSpec, ScheduleError, SqaParams,
};
pub use sweep::{
    field_curve, point_seed, run_sweep, PointResult, SweepError, SweepPlan, SweepResult,
};

use thiserror::Error;

/// Any failure the library can produce, for callers that do not care which
/// subsystem it came from.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Output(#[from] OutputError),
}
