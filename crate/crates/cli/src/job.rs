//! The full pipeline behind `compute`, `verify` and `constants`.

use lyapunov_core::bounds::BoundReport;
use lyapunov_core::traces::Enumeration;
use lyapunov_core::{
    compute_constants, compute_traces_with, det_coefficients, error_bound, lyapunov_estimates,
    monte_carlo_lyapunov, optimal_scaling, EnsembleConstants, McEstimate, ScalingResult,
    TraceOptions,
};
use rug::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{JobConfig, VerifyConfig};
use crate::decimal::{fixed, scientific, scientific_with, Rounding};

/// Significant digits printed for bounds.
pub const BOUND_DIGITS: u32 = 6;
/// Significant digits kept in constant snapshots.
pub const CONSTANT_DIGITS: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JobError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    BudgetExceeded(String),

    #[error("precision unstable at N = {n}: {low} at {low_bits} bits, {high} at {high_bits} bits")]
    PrecisionUnstable {
        n: u32,
        low: String,
        high: String,
        low_bits: u32,
        high_bits: u32,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),
}

impl JobError {
    pub fn exit_code(&self) -> i32 {
        match self {
            JobError::Config(_) => 2,
            JobError::BudgetExceeded(_) => 3,
            JobError::PrecisionUnstable { .. } => 4,
            JobError::Numeric(_) => 1,
        }
    }
}

impl From<lyapunov_core::Error> for JobError {
    fn from(e: lyapunov_core::Error) -> Self {
        use lyapunov_core::Error as E;
        match e {
            E::BudgetExceeded { .. } => JobError::BudgetExceeded(e.to_string()),
            E::NonPositiveEntry { .. }
            | E::SingularMatrix { .. }
            | E::BadProbabilityVector(_)
            | E::InvalidNumber(_) => JobError::Config(e.to_string()),
            _ => JobError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: u32,
    pub lambda_n: String,
    /// Scientific notation rounded upward, or `"invalid"`.
    pub bound: String,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsSnapshot {
    pub c1: String,
    pub column_ratio: Vec<String>,
    pub r: String,
    pub theta: String,
    pub c2: String,
    pub c0: String,
    pub tau_per_matrix: Vec<String>,
    pub tau_weighted: String,
    pub m: u32,
    pub is_all_column_stochastic: bool,
}

impl ConstantsSnapshot {
    pub fn of(k: &EnsembleConstants) -> Self {
        let s = |x: &Float| scientific(x, CONSTANT_DIGITS);
        Self {
            c1: s(&k.c1),
            column_ratio: k.column_ratio.iter().map(s).collect(),
            r: s(&k.r),
            theta: s(&k.theta),
            c2: s(&k.c2),
            c0: s(&k.c0),
            tau_per_matrix: k.tau_per_matrix.iter().map(s).collect(),
            tau_weighted: s(&k.tau_weighted),
            m: k.m,
            is_all_column_stochastic: k.is_all_column_stochastic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizedSnapshot {
    pub lambda0: String,
    pub ratio_bound: String,
    pub is_stochastic_after: bool,
    pub constants: ConstantsSnapshot,
}

impl OptimizedSnapshot {
    pub fn of(s: &ScalingResult) -> Self {
        Self {
            lambda0: scientific(&s.lambda0, CONSTANT_DIGITS),
            ratio_bound: scientific(&s.ratio_bound, CONSTANT_DIGITS),
            is_stochastic_after: s.is_stochastic_after,
            constants: ConstantsSnapshot::of(&s.new_constants),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsUsed {
    pub original: ConstantsSnapshot,
    pub optimized: Option<OptimizedSnapshot>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSnapshot {
    pub mean: f64,
    pub stderr: f64,
    pub steps: u64,
    pub trials: u32,
    pub seed: u64,
}

impl From<McEstimate> for McSnapshot {
    fn from(m: McEstimate) -> Self {
        Self {
            mean: m.mean,
            stderr: m.stderr,
            steps: m.steps,
            trials: m.trials,
            seed: m.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub precision_bits: u32,
    pub digits: u32,
    pub optimize_basis: bool,
    pub rows: Vec<ReportRow>,
    pub constants_used: ConstantsUsed,
    pub mc: Option<McSnapshot>,
    pub stochastic_shortcut: bool,
}

/// Pipeline output at one working precision.
struct Evaluation {
    shortcut: bool,
    lambdas: Vec<Float>,
    bounds: Vec<BoundReport>,
    original: EnsembleConstants,
    scaling: Option<ScalingResult>,
}

fn evaluate(cfg: &JobConfig, prec: u32) -> Result<Evaluation, JobError> {
    let e = cfg.ensemble(prec)?;
    let original = compute_constants(&e);
    let scaling = cfg.optimize_basis.then(|| optimal_scaling(&e));
    let shortcut = original.is_all_column_stochastic
        || scaling.as_ref().is_some_and(|s| s.is_stochastic_after);
    if shortcut {
        return Ok(Evaluation {
            shortcut,
            lambdas: vec![],
            bounds: vec![],
            original,
            scaling,
        });
    }
    let opts = TraceOptions {
        word_cap: cfg.word_cap,
        enumeration: Enumeration::Necklaces,
    };
    let traces = compute_traces_with(&e, cfg.max_n, &opts)?;
    let lambdas = lyapunov_estimates(&det_coefficients(&traces))?;
    let consts = scaling.as_ref().map_or(&original, |s| &s.new_constants);
    let bounds = (1..=cfg.max_n).map(|n| error_bound(n, consts)).collect();
    Ok(Evaluation {
        shortcut,
        lambdas,
        bounds,
        original,
        scaling,
    })
}

fn constants_used(ev: &Evaluation) -> ConstantsUsed {
    ConstantsUsed {
        original: ConstantsSnapshot::of(&ev.original),
        optimized: ev.scaling.as_ref().map(OptimizedSnapshot::of),
    }
}

fn run_mc(cfg: &JobConfig, v: &VerifyConfig) -> Result<McSnapshot, JobError> {
    let e = cfg.ensemble(cfg.precision_bits)?;
    Ok(monte_carlo_lyapunov(&e, v.steps, v.trials, v.seed)?.into())
}

/// Runs the pipeline at the configured precision and again at twice that,
/// rejecting the job if any printed digit of any `Lambda_N` moves. Each bound
/// is the larger of the two runs.
pub fn run_job(cfg: &JobConfig) -> Result<ApproximationReport, JobError> {
    cfg.check()?;
    let low_bits = cfg.precision_bits;
    let high_bits = 2 * low_bits;
    let low = evaluate(cfg, low_bits)?;
    let high = evaluate(cfg, high_bits)?;
    if low.shortcut != high.shortcut {
        return Err(JobError::PrecisionUnstable {
            n: 0,
            low: format!("shortcut={}", low.shortcut),
            high: format!("shortcut={}", high.shortcut),
            low_bits,
            high_bits,
        });
    }

    let rows = if low.shortcut {
        let zero = Float::new(low_bits);
        vec![ReportRow {
            n: 1,
            lambda_n: fixed(&zero, cfg.digits),
            bound: scientific(&zero, BOUND_DIGITS),
            valid: true,
        }]
    } else {
        let mut rows = Vec::with_capacity(cfg.max_n as usize);
        for (i, (lo, hi)) in low.lambdas.iter().zip(&high.lambdas).enumerate() {
            let n = i as u32 + 1;
            let lambda_n = fixed(lo, cfg.digits);
            let check = fixed(hi, cfg.digits);
            if lambda_n != check {
                return Err(JobError::PrecisionUnstable {
                    n,
                    low: lambda_n,
                    high: check,
                    low_bits,
                    high_bits,
                });
            }
            let merged = low.bounds[i].clone().more_conservative(&high.bounds[i]);
            let (bound, valid) = match &merged.bound {
                Some(b) => (scientific_with(b, BOUND_DIGITS, Rounding::Up), true),
                None => ("invalid".to_string(), false),
            };
            rows.push(ReportRow {
                n,
                lambda_n,
                bound,
                valid,
            });
        }
        rows
    };

    let mc = cfg.verify.as_ref().map(|v| run_mc(cfg, v)).transpose()?;
    Ok(ApproximationReport {
        precision_bits: low_bits,
        digits: cfg.digits,
        optimize_basis: cfg.optimize_basis,
        rows,
        constants_used: constants_used(&low),
        mc,
        stochastic_shortcut: low.shortcut,
    })
}

/// Monte Carlo estimate only, with defaults when the job has no `verify`.
pub fn run_verify(cfg: &JobConfig) -> Result<McSnapshot, JobError> {
    cfg.check()?;
    run_mc(cfg, &cfg.verify.clone().unwrap_or_default())
}

/// Constants before and (if enabled) after basis optimization.
pub fn run_constants(cfg: &JobConfig) -> Result<ConstantsUsed, JobError> {
    cfg.check()?;
    let e = cfg.ensemble(cfg.precision_bits)?;
    let original = compute_constants(&e);
    let scaling = cfg.optimize_basis.then(|| optimal_scaling(&e));
    Ok(ConstantsUsed {
        original: ConstantsSnapshot::of(&original),
        optimized: scaling.as_ref().map(OptimizedSnapshot::of),
    })
}
