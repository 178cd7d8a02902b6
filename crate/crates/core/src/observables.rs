//! Observables over sample sets: absolute magnetization and the static
//! structure factor on square or hexagonal reciprocal rasters.

use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{Lattice, LatticeError};
use crate::samplers::{SampleSet, DEGENERACY_TOL};

pub const DEFAULT_RESOLUTION: usize = 64;
pub const MIN_RESOLUTION: usize = 8;
const TWO_PI: f64 = std::f64::consts::TAU;

#[derive(Debug, Error, PartialEq)]
pub enum ObservableError {
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("grid resolution must be at least {min}, got {got}")]
    ResolutionTooSmall { got: usize, min: usize },
    #[error("site index {index} out of range for {len} sites")]
    BadIndex { index: usize, len: usize },
    #[error("sample has {got} spins but the lattice has {expected} sites")]
    LatticeMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Mean over reads of |sum_i s_i| / N, with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MagnetizationStat {
    pub mean_abs_m: f64,
    pub std_err: f64,
    pub reads: usize,
}

pub fn magnetization(samples: &SampleSet) -> Result<MagnetizationStat, ObservableError> {
    if samples.is_empty() {
        return Err(ObservableError::EmptySampleSet);
    }
    let n = samples.samples[0].config.len() as f64;
    let values: Vec<f64> =
        samples.samples.iter().map(|s| s.config.spin_sum().unsigned_abs() as f64 / n).collect();
    let reads = values.len();
    let mean = values.iter().sum::<f64>() / reads as f64;
    let std_err = if reads > 1 {
        let var =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reads - 1) as f64;
        (var / reads as f64).sqrt()
    } else {
        0.0
    };
    Ok(MagnetizationStat { mean_abs_m: mean, std_err, reads })
}

/// Mean over reads of s_i * s_j.
pub fn correlation(samples: &SampleSet, i: usize, j: usize) -> Result<f64, ObservableError> {
    if samples.is_empty() {
        return Err(ObservableError::EmptySampleSet);
    }
    let len = samples.samples[0].config.len();
    for index in [i, j] {
        if index >= len {
            return Err(ObservableError::BadIndex { index, len });
        }
    }
    let sum: i64 = samples
        .samples
        .iter()
        .map(|s| (s.config.spins()[i] * s.config.spins()[j]) as i64)
        .sum();
    Ok(sum as f64 / samples.len() as f64)
}

/// Which reciprocal-space representation the raster uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    /// Sites at their square-frame positions.
    Square,
    /// Sites at their sheared (kagome-frame) positions.
    Hexagonal,
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Zone::Square => write!(f, "square"),
            Zone::Hexagonal => write!(f, "hexagonal"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqOptions {
    pub zone: Zone,
    pub resolution: usize,
    /// Shear applied to positions when the zone is hexagonal.
    pub shear: f64,
    /// Restrict the average to reads at the sample-set minimum energy.
    pub ground_only: bool,
}

impl Default for SqOptions {
    fn default() -> Self {
        SqOptions { zone: Zone::Square, resolution: DEFAULT_RESOLUTION, shear: 1.0, ground_only: false }
    }
}

/// Structure-factor intensities on a `resolution x resolution` raster.
///
/// The raster covers [-2pi, 2pi) per axis, endpoint-exclusive with step
/// `4pi / resolution`: on integer (square-frame) positions those wave vectors
/// are exact discrete-Fourier frequencies, which makes the grid average of
/// S(q) equal 1 to machine precision. Values are stored row-major: index
/// `iy * resolution + ix`, qx varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SqGrid {
    pub zone: Zone,
    pub resolution: usize,
    pub q_start: f64,
    pub q_step: f64,
    pub values: Vec<f64>,
    pub num_sites: usize,
    pub reads: usize,
}

impl SqGrid {
    pub fn q_at(&self, k: usize) -> f64 {
        self.q_start + k as f64 * self.q_step
    }

    pub fn value(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.resolution + ix]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_value(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Index (ix, iy) of the grid point closest to q.
    pub fn nearest_index(&self, q: [f64; 2]) -> (usize, usize) {
        let clamp = |v: f64| {
            (((v - self.q_start) / self.q_step).round() as isize)
                .clamp(0, self.resolution as isize - 1) as usize
        };
        (clamp(q[0]), clamp(q[1]))
    }
}

/// S(q) per read as |sum_i s_i exp(-i q.r_i)|^2 / N, averaged over reads.
pub fn structure_factor(
    samples: &SampleSet,
    lat: &Lattice,
    opts: &SqOptions,
) -> Result<SqGrid, ObservableError> {
    if samples.is_empty() {
        return Err(ObservableError::EmptySampleSet);
    }
    if opts.resolution < MIN_RESOLUTION {
        return Err(ObservableError::ResolutionTooSmall {
            got: opts.resolution,
            min: MIN_RESOLUTION,
        });
    }
    let n = lat.num_sites();
    if samples.samples[0].config.len() != n {
        return Err(ObservableError::LatticeMismatch {
            expected: n,
            got: samples.samples[0].config.len(),
        });
    }
    let positions = match opts.zone {
        Zone::Square => lat.positions_square().to_vec(),
        Zone::Hexagonal => lat.kagome_positions(opts.shear)?,
    };

    let min_energy = samples.min_energy();
    let configs: Vec<&[i8]> = samples
        .samples
        .iter()
        .filter(|s| !opts.ground_only || s.energy <= min_energy + DEGENERACY_TOL)
        .map(|s| s.config.spins())
        .collect();
    let reads = configs.len();

    let res = opts.resolution;
    let q_start = -TWO_PI;
    let q_step = 2.0 * TWO_PI / res as f64;

    // Parallel over raster rows; within a row each point sums reads in a
    // fixed order, so the output is independent of worker scheduling.
    let values: Vec<f64> = (0..res)
        .into_par_iter()
        .flat_map_iter(|iy| {
            let qy = q_start + iy as f64 * q_step;
            let positions = &positions;
            let configs = &configs;
            (0..res).map(move |ix| {
                let qx = q_start + ix as f64 * q_step;
                point_intensity([qx, qy], positions, configs)
            })
        })
        .collect();

    Ok(SqGrid { zone: opts.zone, resolution: res, q_start, q_step, values, num_sites: n, reads })
}

/// Structure factor at a single wave vector, averaged over the given reads.
pub fn structure_factor_at(
    samples: &SampleSet,
    lat: &Lattice,
    zone: Zone,
    shear: f64,
    q: [f64; 2],
) -> Result<f64, ObservableError> {
    if samples.is_empty() {
        return Err(ObservableError::EmptySampleSet);
    }
    if samples.samples[0].config.len() != lat.num_sites() {
        return Err(ObservableError::LatticeMismatch {
            expected: lat.num_sites(),
            got: samples.samples[0].config.len(),
        });
    }
    let positions = match zone {
        Zone::Square => lat.positions_square().to_vec(),
        Zone::Hexagonal => lat.kagome_positions(shear)?,
    };
    let configs: Vec<&[i8]> = samples.samples.iter().map(|s| s.config.spins()).collect();
    Ok(point_intensity(q, &positions, &configs))
}

fn point_intensity(q: [f64; 2], positions: &[[f64; 2]], configs: &[&[i8]]) -> f64 {
    let n = positions.len();
    let mut cos_table = Vec::with_capacity(n);
    let mut sin_table = Vec::with_capacity(n);
    for p in positions {
        let phase = q[0] * p[0] + q[1] * p[1];
        cos_table.push(phase.cos());
        sin_table.push(phase.sin());
    }
    let mut total = 0.0;
    for spins in configs {
        let mut re = 0.0;
        let mut im = 0.0;
        for i in 0..n {
            let s = spins[i] as f64;
            re += s * cos_table[i];
            im -= s * sin_table[i];
        }
        total += (re * re + im * im) / n as f64;
    }
    total / configs.len() as f64
}
