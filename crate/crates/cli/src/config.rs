//! Job files.
//!
//! A job is a JSON document. Matrix entries and probabilities are strings
//! holding exact decimals or `p/q` rationals (plain JSON integers are also
//! accepted); binary floats are rejected so no input is rounded before the
//! working precision is chosen.
//!
//! ```json
//! {
//!   "matrices": [[["2", "1"], ["1", "1"]], [["3", "1"], ["2", "1"]]],
//!   "probabilities": ["1/2", "1/2"],
//!   "max_n": 10,
//!   "precision_bits": 512,
//!   "optimize_basis": true,
//!   "verify": { "steps": 10000, "trials": 100, "seed": 1 },
//!   "output_format": "table",
//!   "digits": 40
//! }
//! ```

use std::path::Path;

use lyapunov_core::exact::parse_exact;
use lyapunov_core::traces::DEFAULT_WORD_CAP;
use lyapunov_core::{validate_ensemble, Ensemble, DEFAULT_PRECISION};
use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::job::JobError;

pub const DEFAULT_MAX_N: u32 = 10;
pub const DEFAULT_DIGITS: u32 = 40;
pub const DEFAULT_STEPS: u64 = 10_000;
pub const DEFAULT_TRIALS: u32 = 100;
pub const DEFAULT_SEED: u64 = 1;
pub const MIN_PRECISION: u32 = 64;

/// A matrix entry or probability as written in the job file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Integer(i64),
}

impl Entry {
    pub fn to_rational(&self) -> Result<Rational, JobError> {
        match self {
            Entry::Text(s) => parse_exact(s).map_err(|e| JobError::Config(e.to_string())),
            Entry::Integer(i) => Ok(Rational::from(*i)),
        }
    }
}

impl From<&str> for Entry {
    fn from(s: &str) -> Self {
        Entry::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_steps")]
    pub steps: u64,
    #[serde(default = "default_trials")]
    pub trials: u32,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub matrices: Vec<[[Entry; 2]; 2]>,
    pub probabilities: Vec<Entry>,
    #[serde(default = "default_max_n")]
    pub max_n: u32,
    #[serde(default = "default_precision")]
    pub precision_bits: u32,
    #[serde(default = "default_true")]
    pub optimize_basis: bool,
    #[serde(default)]
    pub verify: Option<VerifyConfig>,
    #[serde(default)]
    pub output_format: OutputFormat,
    #[serde(default = "default_digits")]
    pub digits: u32,
    #[serde(default = "default_word_cap")]
    pub word_cap: u64,
}

fn default_steps() -> u64 {
    DEFAULT_STEPS
}
fn default_trials() -> u32 {
    DEFAULT_TRIALS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_max_n() -> u32 {
    DEFAULT_MAX_N
}
fn default_precision() -> u32 {
    DEFAULT_PRECISION
}
fn default_true() -> bool {
    true
}
fn default_digits() -> u32 {
    DEFAULT_DIGITS
}
fn default_word_cap() -> u64 {
    DEFAULT_WORD_CAP
}

impl JobConfig {
    /// A config with defaults for everything but the ensemble.
    pub fn new(matrices: Vec<[[Entry; 2]; 2]>, probabilities: Vec<Entry>) -> Self {
        Self {
            matrices,
            probabilities,
            max_n: DEFAULT_MAX_N,
            precision_bits: DEFAULT_PRECISION,
            optimize_basis: true,
            verify: None,
            output_format: OutputFormat::Table,
            digits: DEFAULT_DIGITS,
            word_cap: DEFAULT_WORD_CAP,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, JobError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| JobError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, JobError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| JobError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn check(&self) -> Result<(), JobError> {
        if self.max_n < 1 {
            return Err(JobError::Config("max_n must be at least 1".into()));
        }
        if self.precision_bits < MIN_PRECISION {
            return Err(JobError::Config(format!(
                "precision_bits must be at least {MIN_PRECISION}"
            )));
        }
        if self.matrices.is_empty() {
            return Err(JobError::Config("at least one matrix is required".into()));
        }
        if let Some(v) = &self.verify {
            if v.steps < 1 || v.trials < 2 {
                return Err(JobError::Config(
                    "verify needs steps >= 1 and trials >= 2".into(),
                ));
            }
        }
        Ok(())
    }

    /// Parses every entry exactly and validates the ensemble at `prec` bits.
    pub fn ensemble(&self, prec: u32) -> Result<Ensemble, JobError> {
        let matrices = self
            .matrices
            .iter()
            .map(|m| -> Result<[[Rational; 2]; 2], JobError> {
                Ok([
                    [m[0][0].to_rational()?, m[0][1].to_rational()?],
                    [m[1][0].to_rational()?, m[1][1].to_rational()?],
                ])
            })
            .collect::<Result<Vec<_>, _>>()?;
        let probabilities = self
            .probabilities
            .iter()
            .map(Entry::to_rational)
            .collect::<Result<Vec<_>, _>>()?;
        validate_ensemble(&matrices, &probabilities, prec)
            .map_err(|e| JobError::Config(e.to_string()))
    }
}
