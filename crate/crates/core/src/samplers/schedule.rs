//! Annealing schedules: the classical/transverse scale pair for quantum
//! annealing and the geometric inverse-temperature ramp for classical
//! annealing.

use thiserror::Error;

/// Default initial transverse scale.
pub const DEFAULT_GAMMA0: f64 = 3.0;
/// Default number of annealing-parameter increments.
pub const DEFAULT_STEPS: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("schedule table must have at least two points spanning s = 0 to s = 1")]
    BadTable,
    #[error("classical scale must start at 0 and be nondecreasing")]
    BadClassicalProfile,
    #[error("transverse scale must end at exactly 0 and be nonincreasing")]
    BadTransverseProfile,
    #[error("schedule needs at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("beta must be positive and nondecreasing, got {start} -> {end}")]
    BadBeta { start: f64, end: f64 },
}

/// Piecewise-linear pair of scale profiles over the annealing parameter
/// s in [0, 1]: the classical scale grows from 0 while the transverse scale
/// shrinks to exactly 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealSchedule {
    classical: Vec<(f64, f64)>,
    transverse: Vec<(f64, f64)>,
    steps: usize,
}

impl AnnealSchedule {
    /// Linear ramps: classical scale s, transverse scale gamma0 * (1 - s).
    pub fn linear(gamma0: f64, steps: usize) -> Result<Self, ScheduleError> {
        Self::from_tables(
            vec![(0.0, 0.0), (1.0, 1.0)],
            vec![(0.0, gamma0), (1.0, 0.0)],
            steps,
        )
    }

    pub fn from_tables(
        classical: Vec<(f64, f64)>,
        transverse: Vec<(f64, f64)>,
        steps: usize,
    ) -> Result<Self, ScheduleError> {
        if steps < 2 {
            return Err(ScheduleError::TooFewSteps(steps));
        }
        for table in [&classical, &transverse] {
            if table.len() < 2
                || table[0].0 != 0.0
                || table[table.len() - 1].0 != 1.0
                || table.windows(2).any(|w| w[0].0 >= w[1].0)
                || table.iter().any(|&(s, v)| !s.is_finite() || !v.is_finite())
            {
                return Err(ScheduleError::BadTable);
            }
        }
        if classical[0].1 != 0.0 || classical.windows(2).any(|w| w[0].1 > w[1].1) {
            return Err(ScheduleError::BadClassicalProfile);
        }
        if transverse[transverse.len() - 1].1 != 0.0
            || transverse.windows(2).any(|w| w[0].1 < w[1].1)
            || transverse.iter().any(|&(_, v)| v < 0.0)
        {
            return Err(ScheduleError::BadTransverseProfile);
        }
        Ok(AnnealSchedule { classical, transverse, steps })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Classical energy scale at annealing parameter s.
    pub fn classical_at(&self, s: f64) -> f64 {
        lerp_table(&self.classical, s)
    }

    /// Transverse energy scale at annealing parameter s.
    pub fn transverse_at(&self, s: f64) -> f64 {
        lerp_table(&self.transverse, s)
    }

    /// Initial transverse scale.
    pub fn gamma0(&self) -> f64 {
        self.transverse[0].1
    }
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        Self::linear(DEFAULT_GAMMA0, DEFAULT_STEPS).expect("default schedule is valid")
    }
}

fn lerp_table(table: &[(f64, f64)], s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    let hi = match table.iter().position(|&(x, _)| x >= s) {
        Some(0) => return table[0].1,
        Some(k) => k,
        None => return table[table.len() - 1].1,
    };
    let (x0, v0) = table[hi - 1];
    let (x1, v1) = table[hi];
    v0 + (v1 - v0) * (s - x0) / (x1 - x0)
}

/// Geometric ramp of the inverse temperature across a fixed number of sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaSchedule {
    start: f64,
    end: f64,
}

impl BetaSchedule {
    pub const DEFAULT_START: f64 = 0.1;
    pub const DEFAULT_END: f64 = 10.0;

    pub fn geometric(start: f64, end: f64) -> Result<Self, ScheduleError> {
        if !(start > 0.0 && end >= start && start.is_finite() && end.is_finite()) {
            return Err(ScheduleError::BadBeta { start, end });
        }
        Ok(BetaSchedule { start, end })
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    /// Inverse temperature for sweep `t` of `total`.
    pub fn at(&self, t: usize, total: usize) -> f64 {
        if total <= 1 {
            return self.end;
        }
        let frac = t as f64 / (total - 1) as f64;
        self.start * (self.end / self.start).powf(frac)
    }
}

impl Default for BetaSchedule {
    fn default() -> Self {
        BetaSchedule { start: Self::DEFAULT_START, end: Self::DEFAULT_END }
    }
}
