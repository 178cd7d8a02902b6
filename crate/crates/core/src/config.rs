//! Run configuration: strict `key = value` files and `--key value` flags.
//!
//! Both surfaces share one key table; an unrecognized key fails loudly and
//! names itself, so typos cannot silently fall back to defaults. Flags are
//! applied after the file, so they override it.

use std::path::PathBuf;

use thiserror::Error;

use crate::model::DEFAULT_CHAIN_COUPLING;
use crate::observables::{SqOptions, Zone, DEFAULT_RESOLUTION};
use crate::samplers::{
    AnnealSchedule, BetaSchedule, EngineSpec, SaParams, SamplerSpec, SqaParams, DEFAULT_BETA,
    DEFAULT_GAMMA0, DEFAULT_READS, DEFAULT_SLICES, DEFAULT_STEPS, DEFAULT_SWEEPS,
};
use crate::sweep::{round10, SweepPlan, DEFAULT_J, DEFAULT_L};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("malformed line {line}: expected `key = value`")]
    MalformedLine { line: usize },
    #[error("flag `--{0}` is missing its value")]
    MissingValue(String),
    #[error("expected `--key` style flag, got `{0}`")]
    NotAFlag(String),
    #[error("out-of-range value for `{key}`: {reason}")]
    OutOfRange { key: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Sa,
    Sqa,
    Exact,
}

/// Everything a run needs; mirrors the sweep plan plus output handling.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub l: u32,
    pub j: f64,
    pub jprime: Vec<f64>,
    pub h: Vec<f64>,
    pub engine: EngineChoice,
    pub reads: usize,
    pub sweeps: usize,
    pub beta0: f64,
    pub beta1: f64,
    pub slices: usize,
    pub beta: f64,
    pub gamma0: f64,
    pub steps: usize,
    pub seed: u64,
    pub embed: bool,
    pub jfm: f64,
    pub zone: Zone,
    pub resolution: usize,
    pub shear: f64,
    pub outdir: PathBuf,
    pub write_sq: bool,
    pub write_samples: bool,
    pub sq_ground_only: bool,
    pub random_order: bool,
    pub workers: usize,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let (jprime, h) = SweepPlan::default_grid();
        RunConfig {
            l: DEFAULT_L,
            j: DEFAULT_J,
            jprime,
            h,
            engine: EngineChoice::Sa,
            reads: DEFAULT_READS,
            sweeps: DEFAULT_SWEEPS,
            beta0: BetaSchedule::DEFAULT_START,
            beta1: BetaSchedule::DEFAULT_END,
            slices: DEFAULT_SLICES,
            beta: DEFAULT_BETA,
            gamma0: DEFAULT_GAMMA0,
            steps: DEFAULT_STEPS,
            seed: 1,
            embed: false,
            jfm: DEFAULT_CHAIN_COUPLING,
            zone: Zone::Square,
            resolution: DEFAULT_RESOLUTION,
            shear: 1.0,
            outdir: PathBuf::from("out"),
            write_sq: false,
            write_samples: false,
            sq_ground_only: false,
            random_order: false,
            workers: 0,
            verbose: false,
        }
    }
}

/// Keys that take no mandatory value on the command line (`--embed` alone
/// means `embed = true`).
const BOOL_KEYS: &[&str] =
    &["embed", "write-sq", "write-samples", "sq-ground-only", "random-order", "verbose"];

pub const KNOWN_KEYS: &[&str] = &[
    "l", "j", "jprime", "h", "engine", "reads", "sweeps", "beta0", "beta1", "slices", "beta",
    "gamma0", "steps", "seed", "embed", "jfm", "zone", "resolution", "shear", "outdir",
    "write-sq", "write-samples", "sq-ground-only", "random-order", "workers", "verbose",
];

impl RunConfig {
    /// Apply one key/value pair from either surface.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "l" => self.l = parse_num(key, value)?,
            "j" => self.j = parse_num(key, value)?,
            "jprime" => self.jprime = parse_list(key, value)?,
            "h" => self.h = parse_list(key, value)?,
            "engine" => {
                self.engine = match value {
                    "sa" => EngineChoice::Sa,
                    "sqa" => EngineChoice::Sqa,
                    "exact" => EngineChoice::Exact,
                    _ => {
                        return Err(bad(key, value, "expected sa, sqa or exact"));
                    }
                }
            }
            "reads" => self.reads = parse_num(key, value)?,
            "sweeps" => self.sweeps = parse_num(key, value)?,
            "beta0" => self.beta0 = parse_num(key, value)?,
            "beta1" => self.beta1 = parse_num(key, value)?,
            "slices" => self.slices = parse_num(key, value)?,
            "beta" => self.beta = parse_num(key, value)?,
            "gamma0" => self.gamma0 = parse_num(key, value)?,
            "steps" => self.steps = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "embed" => self.embed = parse_bool(key, value)?,
            "jfm" => self.jfm = parse_num(key, value)?,
            "zone" => {
                self.zone = match value {
                    "square" => Zone::Square,
                    "hexagonal" => Zone::Hexagonal,
                    _ => return Err(bad(key, value, "expected square or hexagonal")),
                }
            }
            "resolution" => self.resolution = parse_num(key, value)?,
            "shear" => self.shear = parse_num(key, value)?,
            "outdir" => self.outdir = PathBuf::from(value),
            "write-sq" => self.write_sq = parse_bool(key, value)?,
            "write-samples" => self.write_samples = parse_bool(key, value)?,
            "sq-ground-only" => self.sq_ground_only = parse_bool(key, value)?,
            "random-order" => self.random_order = parse_bool(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "verbose" => self.verbose = parse_bool(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Parse a line-oriented `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::MalformedLine { line: lineno + 1 })?;
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Apply `--key value` flags. Bool keys may omit the value.
    pub fn apply_flags(&mut self, args: &[String]) -> Result<(), ConfigError> {
        let mut it = args.iter().peekable();
        while let Some(arg) = it.next() {
            let key = arg
                .strip_prefix("--")
                .ok_or_else(|| ConfigError::NotAFlag(arg.clone()))?;
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey(key.to_string()));
            }
            let inline_true = BOOL_KEYS.contains(&key)
                && it.peek().is_none_or(|next| next.starts_with("--"));
            let value = if inline_true {
                "true".to_string()
            } else {
                it.next().ok_or_else(|| ConfigError::MissingValue(key.to_string()))?.clone()
            };
            self.apply(key, &value)?;
        }
        Ok(())
    }

    /// Defaults, then the optional config file, then flags.
    pub fn from_sources(file: Option<&str>, flags: &[String]) -> Result<Self, ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(text) = file {
            cfg.apply_file(text)?;
        }
        cfg.apply_flags(flags)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |key: &str, ok: bool, reason: &str| {
            if ok {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { key: key.into(), reason: reason.into() })
            }
        };
        range("l", self.l >= 1, "must be at least 1")?;
        range("j", self.j > 0.0 && self.j.is_finite(), "must be positive")?;
        range("jprime", !self.jprime.is_empty(), "list must not be empty")?;
        range("h", !self.h.is_empty(), "list must not be empty")?;
        range("reads", self.reads >= 1, "must be at least 1")?;
        range("sweeps", self.sweeps >= 1, "must be at least 1")?;
        range("beta0", self.beta0 > 0.0, "must be positive")?;
        range("beta1", self.beta1 >= self.beta0, "must be >= beta0")?;
        range("slices", self.slices >= 2, "must be at least 2")?;
        range("beta", self.beta > 0.0, "must be positive")?;
        range("gamma0", self.gamma0 >= 0.0, "must be nonnegative")?;
        range("steps", self.steps >= 2, "must be at least 2")?;
        range("resolution", self.resolution >= 8, "must be at least 8")?;
        range("shear", (0.0..=1.0).contains(&self.shear), "must lie in [0, 1]")?;
        Ok(())
    }

    pub fn engine_spec(&self) -> EngineSpec {
        match self.engine {
            EngineChoice::Exact => EngineSpec::Exact,
            EngineChoice::Sa => EngineSpec::Anneal(SaParams {
                sweeps: self.sweeps,
                betas: BetaSchedule::geometric(self.beta0, self.beta1)
                    .expect("validated beta range"),
                randomized_order: self.random_order,
            }),
            EngineChoice::Sqa => EngineSpec::QuantumAnneal(SqaParams {
                slices: self.slices,
                beta: self.beta,
                schedule: AnnealSchedule::linear(self.gamma0, self.steps)
                    .expect("validated schedule parameters"),
            }),
        }
    }

    pub fn sampler_spec(&self) -> SamplerSpec {
        SamplerSpec {
            engine: self.engine_spec(),
            reads: self.reads,
            seed: self.seed,
            embedding: self.embed.then_some(self.jfm),
        }
    }

    pub fn sq_options(&self) -> SqOptions {
        SqOptions {
            zone: self.zone,
            resolution: self.resolution,
            shear: self.shear,
            ground_only: self.sq_ground_only,
        }
    }

    pub fn plan(&self) -> SweepPlan {
        SweepPlan {
            l: self.l,
            j: self.j,
            jprimes: self.jprime.clone(),
            fields: self.h.clone(),
            sampler: self.sampler_spec(),
            sq: self.write_sq.then(|| self.sq_options()),
            keep_samples: self.write_samples,
        }
    }
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), value: value.to_string(), reason: reason.into() }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e: T::Err| bad(key, value, &e.to_string()))
}

/// Accepts a single number, a comma list, or a `start:step:end` range
/// (end inclusive up to rounding).
fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    if let Some((start, rest)) = value.split_once(':') {
        let (step, end) = rest
            .split_once(':')
            .ok_or_else(|| bad(key, value, "range syntax is start:step:end"))?;
        let start: f64 = parse_num(key, start.trim())?;
        let step: f64 = parse_num(key, step.trim())?;
        let end: f64 = parse_num(key, end.trim())?;
        if step.is_nan() || step <= 0.0 || end < start {
            return Err(bad(key, value, "range needs step > 0 and end >= start"));
        }
        let count = ((end - start) / step + 1.5).floor() as usize;
        let values: Vec<f64> =
            (0..count).map(|k| round10(start + step * k as f64)).filter(|&v| v <= end + 1e-9).collect();
        return Ok(values);
    }
    value
        .split(',')
        .map(|tok| parse_num(key, tok.trim()))
        .collect()
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "1" => Ok(true),
        "false" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn empty_input_yields_documented_defaults() {
        let cfg = RunConfig::from_sources(None, &[]).unwrap();
        assert_eq!(cfg.j, 0.6);
        assert_eq!(cfg.l, 8);
        assert_eq!(cfg.jprime.len(), 29);
        assert_eq!(cfg.jprime[0], 0.3);
        assert_eq!(*cfg.jprime.last().unwrap(), 1.7);
        assert_eq!(cfg.reads, 1000);
        assert_eq!(cfg.engine, EngineChoice::Sa);
    }

    #[test]
    fn file_keys_map_directly() {
        let text = "jprime = 0.6\nh = 0.3\nl = 8\nengine = sa\nreads = 500\n";
        let mut cfg = RunConfig::default();
        cfg.apply_file(text).unwrap();
        assert_eq!(cfg.jprime, vec![0.6]);
        assert_eq!(cfg.h, vec![0.3]);
        assert_eq!(cfg.reads, 500);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = "# a comment\n\nseed = 42   # trailing comment\n";
        let mut cfg = RunConfig::default();
        cfg.apply_file(text).unwrap();
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn bad_value_names_the_key() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply("jprime", "abc").unwrap_err();
        match err {
            ConfigError::BadValue { key, .. } => assert_eq!(key, "jprime"),
            other => panic!("unexpected error {other:?}"),
        }
        let err = cfg.apply("zone", "triclinic").unwrap_err();
        match err {
            ConfigError::BadValue { key, value, .. } => {
                assert_eq!(key, "zone");
                assert_eq!(value, "triclinic");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_fail_on_both_surfaces() {
        let mut cfg = RunConfig::default();
        assert_eq!(
            cfg.apply_file("froobnicate = 3\n"),
            Err(ConfigError::UnknownKey("froobnicate".into()))
        );
        assert_eq!(
            cfg.apply_flags(&flags(&["--froobnicate", "3"])),
            Err(ConfigError::UnknownKey("froobnicate".into()))
        );
    }

    #[test]
    fn flags_override_file() {
        let cfg =
            RunConfig::from_sources(Some("reads = 100\nseed = 5\n"), &flags(&["--reads", "250"]))
                .unwrap();
        assert_eq!(cfg.reads, 250);
        assert_eq!(cfg.seed, 5);
    }

    #[test]
    fn bool_flags_support_bare_form() {
        let cfg = RunConfig::from_sources(None, &flags(&["--embed", "--write-sq"])).unwrap();
        assert!(cfg.embed);
        assert!(cfg.write_sq);
        let cfg = RunConfig::from_sources(None, &flags(&["--embed", "false"])).unwrap();
        assert!(!cfg.embed);
    }

    #[test]
    fn range_syntax_builds_clean_grids() {
        let mut cfg = RunConfig::default();
        cfg.apply("jprime", "0.3:0.05:1.7").unwrap();
        assert_eq!(cfg.jprime.len(), 29);
        assert_eq!(cfg.jprime[7], 0.65);
        cfg.apply("h", "0,0.15,0.3").unwrap();
        assert_eq!(cfg.h, vec![0.0, 0.15, 0.3]);
    }

    #[test]
    fn validation_names_out_of_range_keys() {
        let err = RunConfig::from_sources(None, &flags(&["--l", "0"])).unwrap_err();
        assert!(matches!(err, ConfigError::OutOfRange { ref key, .. } if key == "l"));
        let err = RunConfig::from_sources(None, &flags(&["--resolution", "4"])).unwrap_err();
        assert!(matches!(err, ConfigError::OutOfRange { ref key, .. } if key == "resolution"));
    }

    #[test]
    fn malformed_file_line_is_reported_with_its_number() {
        let mut cfg = RunConfig::default();
        assert_eq!(
            cfg.apply_file("l = 4\nnot a kv line\n"),
            Err(ConfigError::MalformedLine { line: 2 })
        );
    }
}
