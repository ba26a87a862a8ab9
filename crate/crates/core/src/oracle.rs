//! Independent reference values: a seeded Monte Carlo estimate of the
//! Lyapunov exponent in double precision, and the exact single-matrix case.
//!
//! # Random stream
//!
//! Each trial owns an xorshift64* generator (Vigna 2016):
//!
//! ```text
//! x ^= x >> 12;  x ^= x << 25;  x ^= x >> 27;
//! output = x * 0x2545F4914F6CDD1D   (wrapping)
//! ```
//!
//! seeded with `splitmix64(seed + trial)` (wrapping add; a zero state is
//! replaced by `0x9E3779B97F4A7C15`). A uniform in `[0, 1)` is
//! `(output >> 11) * 2^-53`, and index `i` is the first with
//! `u < p_1 + ... + p_i` (the last index if rounding leaves none).

use rayon::prelude::*;
use rug::Float;

use crate::error::{Error, Result};
use crate::matrix::{Ensemble, PositiveMatrix2};

/// Steps between renormalizations of the running product.
pub const DEFAULT_RENORM_INTERVAL: u64 = 32;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    pub fn new(seed: u64) -> Self {
        let state = if seed == 0 {
            0x9E37_79B9_7F4A_7C15
        } else {
            seed
        };
        Self { state }
    }

    /// Stream for trial `trial` of a run seeded with `seed`.
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        Self::new(splitmix64(seed.wrapping_add(trial)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub steps: u64,
    pub trials: u32,
    pub seed: u64,
}

#[derive(Clone, Copy)]
struct M2([f64; 4]);

impl M2 {
    fn of(m: &PositiveMatrix2) -> Self {
        M2([
            m.a().to_f64(),
            m.b().to_f64(),
            m.c().to_f64(),
            m.d().to_f64(),
        ])
    }

    fn mul(&self, o: &M2) -> M2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        M2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    /// Largest singular value.
    fn op_norm(&self) -> f64 {
        let [a, b, c, d] = self.0;
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = (s * s - 4.0 * det * det).max(0.0).sqrt();
        ((s + disc) / 2.0).sqrt()
    }

    fn scale(&mut self, k: f64) {
        self.0.iter_mut().for_each(|x| *x *= k);
    }
}

/// Sum of log-norms accumulated over one trial of `steps` random factors,
/// renormalizing every `interval` steps. Dividing by `steps` gives the
/// trial's estimate.
pub fn trial_log_norm(e: &Ensemble, steps: u64, seed: u64, trial: u64, interval: u64) -> f64 {
    let ms: Vec<M2> = e.matrices().iter().map(M2::of).collect();
    let mut cumulative = Vec::with_capacity(e.len());
    let mut acc = 0.0;
    for p in e.probabilities() {
        acc += p.to_f64();
        cumulative.push(acc);
    }
    let mut rng = Xorshift64Star::for_trial(seed, trial);
    let interval = interval.max(1);
    let mut product = M2([1.0, 0.0, 0.0, 1.0]);
    let mut log_sum = 0.0;
    for step in 1..=steps {
        let u = rng.next_f64();
        let idx = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(ms.len() - 1);
        product = product.mul(&ms[idx]);
        if step % interval == 0 {
            let norm = product.op_norm();
            log_sum += norm.ln();
            product.scale(1.0 / norm);
        }
    }
    log_sum + product.op_norm().ln()
}

pub fn monte_carlo_lyapunov(
    e: &Ensemble,
    steps: u64,
    trials: u32,
    seed: u64,
) -> Result<McEstimate> {
    monte_carlo_lyapunov_with(e, steps, trials, seed, DEFAULT_RENORM_INTERVAL)
}

pub fn monte_carlo_lyapunov_with(
    e: &Ensemble,
    steps: u64,
    trials: u32,
    seed: u64,
    interval: u64,
) -> Result<McEstimate> {
    if steps == 0 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least one step".into(),
        ));
    }
    if trials < 2 {
        return Err(Error::InvalidArgument(
            "Monte Carlo needs at least two trials".into(),
        ));
    }
    let samples: Vec<f64> = (0..u64::from(trials))
        .into_par_iter()
        .map(|trial| trial_log_norm(e, steps, seed, trial, interval) / steps as f64)
        .collect();
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        steps,
        trials,
        seed,
    })
}

/// `log l1(m)`: the exponent of the constant sequence `m, m, m, ...`.
pub fn exact_single_matrix(m: &PositiveMatrix2) -> Float {
    m.perron_root().ln()
}
