//! Parameter sweeps over (J', h) grids with per-point seed derivation.

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError};
use crate::model::{ModelError, SpinModel};
use crate::observables::{
    magnetization, structure_factor, MagnetizationStat, ObservableError, SqGrid, SqOptions,
};
use crate::rng::splitmix64;
use crate::samplers::{sample, SampleSet, SamplerError, SamplerSpec};

pub const DEFAULT_L: u32 = 8;
pub const DEFAULT_J: f64 = 0.6;

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("sweep needs at least one J' value and one h value")]
    EmptyGrid,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("point (jprime = {jprime}, h = {h}): {source}")]
    Point { jprime: f64, h: f64, source: PointError },
}

#[derive(Debug, Error, PartialEq)]
pub enum PointError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Observable(#[from] ObservableError),
}

/// A (J', h) grid over a fixed lattice with one sampler configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub l: u32,
    pub j: f64,
    pub jprimes: Vec<f64>,
    pub fields: Vec<f64>,
    pub sampler: SamplerSpec,
    /// Compute a structure-factor map per point when set.
    pub sq: Option<SqOptions>,
    /// Keep the raw sample set on every point (for dump output).
    pub keep_samples: bool,
}

impl SweepPlan {
    /// J' from 0.3 to 1.7 in steps of 0.05; h in {0, 0.1, 0.2, 0.3, 0.45, 0.6}.
    pub fn default_grid() -> (Vec<f64>, Vec<f64>) {
        let jprimes = (0..=28).map(|k| 0.3 + 0.05 * k as f64).map(round10).collect();
        let fields = vec![0.0, 0.1, 0.2, 0.3, 0.45, 0.6];
        (jprimes, fields)
    }
}

impl Default for SweepPlan {
    fn default() -> Self {
        let (jprimes, fields) = Self::default_grid();
        SweepPlan {
            l: DEFAULT_L,
            j: DEFAULT_J,
            jprimes,
            fields,
            sampler: SamplerSpec::default(),
            sq: None,
            keep_samples: false,
        }
    }
}

/// Round to 10 decimal places; keeps grid values built from a step pretty.
pub fn round10(v: f64) -> f64 {
    (v * 1e10).round() / 1e10
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub jprime: f64,
    pub h: f64,
    pub mag: MagnetizationStat,
    pub sq: Option<SqGrid>,
    pub min_energy: f64,
    pub chain_break_rate: Option<f64>,
    /// Present only when the plan asked to keep raw samples.
    pub samples: Option<SampleSet>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One entry per plan point, sorted by (J', h).
    pub points: Vec<PointResult>,
    pub plan: SweepPlan,
    pub code_version: String,
}

/// Seed for grid point (jp_idx, h_idx): a splitmix64 hash of the base seed and
/// both indices, so adding or removing points never shifts other points'
/// random streams.
pub fn point_seed(base: u64, jp_idx: usize, h_idx: usize) -> u64 {
    splitmix64(base ^ splitmix64(((jp_idx as u64) << 32) | h_idx as u64))
}

/// Sample every (J', h) point of the plan and reduce to magnetization (and
/// optionally structure-factor) tables.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult, SweepError> {
    if plan.jprimes.is_empty() || plan.fields.is_empty() {
        return Err(SweepError::EmptyGrid);
    }
    let lat = Lattice::new(plan.l)?;

    let grid: Vec<(usize, usize)> = (0..plan.jprimes.len())
        .flat_map(|jp| (0..plan.fields.len()).map(move |h| (jp, h)))
        .collect();

    let mut points: Vec<PointResult> = grid
        .par_iter()
        .map(|&(jp_idx, h_idx)| {
            let jprime = plan.jprimes[jp_idx];
            let h = plan.fields[h_idx];
            run_point(plan, &lat, jprime, h, point_seed(plan.sampler.seed, jp_idx, h_idx))
                .map_err(|source| SweepError::Point { jprime, h, source })
        })
        .collect::<Result<_, _>>()?;
    points.sort_by(|a, b| a.jprime.total_cmp(&b.jprime).then(a.h.total_cmp(&b.h)));

    Ok(SweepResult {
        points,
        plan: plan.clone(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn run_point(
    plan: &SweepPlan,
    lat: &Lattice,
    jprime: f64,
    h: f64,
    seed: u64,
) -> Result<PointResult, PointError> {
    let model = SpinModel::from_lattice(lat, plan.j, jprime, h)?;
    let spec = SamplerSpec { seed, ..plan.sampler.clone() };
    let set = sample(&model, &spec)?;
    let mag = magnetization(&set)?;
    let sq = match &plan.sq {
        Some(opts) => Some(structure_factor(&set, lat, opts)?),
        None => None,
    };
    Ok(PointResult {
        jprime,
        h,
        mag,
        sq,
        min_energy: set.min_energy(),
        chain_break_rate: set.chain_break_rate(),
        samples: plan.keep_samples.then_some(set),
    })
}

/// Magnetization against h at a single J'; rows ordered by h.
pub fn field_curve(plan: &SweepPlan, jprime: f64) -> Result<Vec<PointResult>, SweepError> {
    let restricted = SweepPlan { jprimes: vec![jprime], ..plan.clone() };
    Ok(run_sweep(&restricted)?.points)
}
