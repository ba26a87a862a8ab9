//! Effective bound on `|Lambda - Lambda_N|`.
//!
//! With `c_n = n C0^n r^(n(n+1)/2) / prod_{i=1..n} (1 - r^i)`:
//!
//! ```text
//! alpha+   = sum_{n>=1} c_n          beta+   = e C2 alpha+
//! alpha_N+ = sum_{n>N}  c_n          beta_N+ = e C2 alpha_N+
//! alpha-   = (1 - s)^(M-2) prod_{n>=M} (1 - C0 r^((n+1)/2))
//!
//! |Lambda - Lambda_N| <= beta_N+ / (alpha- - alpha_N+)
//!                        + alpha_N+ beta+ / (alpha- (alpha- - alpha_N+))
//! ```
//!
//! valid once `alpha_N+ < alpha-`. The infinite sums are closed with a
//! geometric majorant and the infinite product with `prod (1 - x_n) >=
//! 1 - sum x_n`. Rounding is absorbed by inflating every upper estimate (and
//! deflating every lower one) by a relative `2^-(prec-16)`.

use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::matrix::{tolerance, EnsembleConstants};

/// Which of the two majorant series a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `c_n`, majorizing `n |a_n|`.
    Alpha,
    /// `e C2 c_n`, majorizing `|alpha_n|`.
    Beta,
}

fn e_c2(consts: &EnsembleConstants) -> Float {
    let prec = consts.precision();
    Float::with_val(prec, 1).exp() * &consts.c2
}

/// `C0^n r^(n(n+1)/2) / prod_{i=1..n} (1 - r^i)`, a majorant of `|a_n|`.
pub fn coefficient_majorant(n: u32, consts: &EnsembleConstants) -> Float {
    let prec = consts.precision();
    let r = &consts.r;
    let mut value = Float::with_val(prec, 1);
    let mut r_pow = Float::with_val(prec, 1);
    for _ in 1..=n {
        r_pow *= r;
        value *= &consts.c0;
        value *= &r_pow;
        value /= Float::with_val(prec, 1u32 - &r_pow);
    }
    value
}

/// `n e C2 C0^n r^(n(n+1)/2) / prod (1 - r^i)`, a majorant of `|alpha_n|`.
pub fn derivative_majorant(n: u32, consts: &EnsembleConstants) -> Float {
    series_term(n, consts, SeriesKind::Beta)
}

pub fn series_term(n: u32, consts: &EnsembleConstants, kind: SeriesKind) -> Float {
    let term = coefficient_majorant(n, consts) * n;
    match kind {
        SeriesKind::Alpha => term,
        SeriesKind::Beta => term * e_c2(consts),
    }
}

/// `sup_{n >= start} c_{n+1} / c_n`. The ratio
/// `((n+1)/n) C0 r^(n+1) / (1 - r^(n+1))` decreases in `n`, so the sup is
/// attained at `n = start`.
pub fn term_ratio_bound(start: u32, consts: &EnsembleConstants) -> Float {
    let prec = consts.precision();
    let r_pow = Float::with_val(prec, rug::ops::Pow::pow(&consts.r, start + 1));
    let mut q = Float::with_val(prec, &consts.c0 * &r_pow);
    q /= Float::with_val(prec, 1u32 - &r_pow);
    q *= start + 1;
    q /= start;
    q
}

/// Upper bound on `sum_{n >= start} term_n` from the geometric majorant
/// `term_start / (1 - q)`.
pub fn tail_bound_series(
    start: u32,
    consts: &EnsembleConstants,
    kind: SeriesKind,
) -> Result<Float> {
    if start == 0 {
        return Err(Error::InvalidArgument(
            "series start must be at least 1".into(),
        ));
    }
    let q = term_ratio_bound(start, consts);
    if q >= 1 {
        return Err(Error::RatioNotContracting(start));
    }
    let prec = consts.precision();
    Ok(series_term(start, consts, kind) / Float::with_val(prec, 1u32 - &q))
}

/// Upper estimate of `sum_{n >= start} term_n`: explicit terms until the tail
/// majorant is negligible against the partial sum, then the tail majorant.
pub fn series_sum_from(start: u32, consts: &EnsembleConstants, kind: SeriesKind) -> Float {
    let prec = consts.precision();
    let start = start.max(1);
    let negligible = Float::with_val(prec, Float::i_exp(1, -(prec as i32 + 16)));
    let mut sum = Float::with_val(prec, 0);
    let mut term = series_term(start, consts, kind);
    let mut r_pow = Float::with_val(prec, rug::ops::Pow::pow(&consts.r, start));
    let mut n = start;
    loop {
        let q = term_ratio_bound(n, consts);
        if q < 1 {
            let tail = Float::with_val(prec, &term / Float::with_val(prec, 1u32 - &q));
            if tail <= Float::with_val(prec, &sum * &negligible) || tail.is_zero() {
                sum += tail;
                return sum;
            }
        }
        sum += &term;
        // c_{n+1} = c_n ((n+1)/n) C0 r^(n+1) / (1 - r^(n+1))
        r_pow *= &consts.r;
        term *= &consts.c0;
        term *= &r_pow;
        term /= Float::with_val(prec, 1u32 - &r_pow);
        term *= n + 1;
        term /= n;
        n += 1;
    }
}

/// Default truncation slack for the infinite product in `alpha-`.
pub fn default_epsilon(prec: u32) -> Float {
    Float::with_val(prec, Float::i_exp(1, -64))
}

/// `sum_{n > cutoff} C0 r^((n+1)/2) = C0 r^((cutoff+2)/2) / (1 - sqrt r)`.
fn product_remainder(consts: &EnsembleConstants, cutoff: u32) -> Float {
    let prec = consts.precision();
    let root = Float::with_val(prec, consts.r.sqrt_ref());
    let head = Float::with_val(prec, rug::ops::Pow::pow(&root, cutoff + 2));
    head * &consts.c0 / Float::with_val(prec, 1u32 - &root)
}

/// Lower bound on `|sum_n n b_n(0)|` with the product taken explicitly for
/// `n = M..=cutoff`. `None` if the remainder sum is not below 1.
pub fn alpha_minus_truncated(consts: &EnsembleConstants, cutoff: u32) -> Option<Float> {
    let prec = consts.precision();
    let m = consts.m;
    let remainder = product_remainder(consts, cutoff.max(m - 1));
    if remainder >= 1 {
        return None;
    }
    let root = Float::with_val(prec, consts.r.sqrt_ref());
    let mut power = Float::with_val(prec, rug::ops::Pow::pow(&root, m + 1));
    let mut value = Float::with_val(prec, 1u32 - &consts.tau_weighted);
    value = Float::with_val(prec, rug::ops::Pow::pow(&value, m - 2));
    let mut factor = Float::new(prec);
    for _ in m..=cutoff {
        factor.assign(&consts.c0 * &power);
        value *= Float::with_val(prec, 1u32 - &factor);
        power *= &root;
    }
    value *= Float::with_val(prec, 1u32 - remainder);
    Some(value)
}

/// Lower bound on `|sum_n n b_n(0)|`, choosing the explicit cutoff so that
/// the remainder factor exceeds `1 - epsilon`.
pub fn alpha_minus(consts: &EnsembleConstants, epsilon: &Float) -> Float {
    let mut cutoff = consts.m;
    while product_remainder(consts, cutoff) >= *epsilon {
        cutoff += 1;
    }
    alpha_minus_truncated(consts, cutoff).expect("remainder below epsilon")
}

/// Every series quantity behind the bound at level `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: u32,
    pub alpha_minus: Float,
    pub alpha_plus: Float,
    pub alpha_n_plus: Float,
    pub beta_plus: Float,
    pub beta_n_plus: Float,
    /// `None` while `alpha_N+ >= alpha-` (bound not yet applicable).
    pub bound: Option<Float>,
    /// Whether the factor `(1 - s)^(M-2)` with the weighted Birkhoff
    /// coefficient `s` is present, i.e. `M > 2`.
    pub used_weighted_birkhoff: bool,
}

impl BoundReport {
    pub fn is_valid(&self) -> bool {
        self.bound.is_some()
    }

    /// Combines two reports for the same `n` (typically computed at two
    /// precisions), keeping the more conservative side of every quantity.
    pub fn more_conservative(self, other: &BoundReport) -> BoundReport {
        let max = |x: Float, y: &Float| {
            if *y > x {
                Float::with_val(x.prec(), y)
            } else {
                x
            }
        };
        let min = |x: Float, y: &Float| {
            if *y < x {
                Float::with_val(x.prec(), y)
            } else {
                x
            }
        };
        let bound = match (self.bound, &other.bound) {
            (Some(x), Some(y)) => Some(max(x, y)),
            _ => None,
        };
        BoundReport {
            n: self.n,
            alpha_minus: min(self.alpha_minus, &other.alpha_minus),
            alpha_plus: max(self.alpha_plus, &other.alpha_plus),
            alpha_n_plus: max(self.alpha_n_plus, &other.alpha_n_plus),
            beta_plus: max(self.beta_plus, &other.beta_plus),
            beta_n_plus: max(self.beta_n_plus, &other.beta_n_plus),
            bound,
            used_weighted_birkhoff: self.used_weighted_birkhoff,
        }
    }
}

pub fn error_bound(n: u32, consts: &EnsembleConstants) -> BoundReport {
    error_bound_with(n, consts, &default_epsilon(consts.precision()))
}

pub fn error_bound_with(n: u32, consts: &EnsembleConstants, epsilon: &Float) -> BoundReport {
    let prec = consts.precision();
    let slack = tolerance(prec);
    let up = |x: Float| {
        let inflate = Float::with_val(prec, 1u32 + &slack);
        x * inflate
    };
    let down = |x: Float| {
        let deflate = Float::with_val(prec, 1u32 - &slack);
        x * deflate
    };

    let alpha_minus = down(alpha_minus(consts, epsilon));
    let alpha_plus = up(series_sum_from(1, consts, SeriesKind::Alpha));
    let alpha_n_plus = up(series_sum_from(n + 1, consts, SeriesKind::Alpha));
    let beta_plus = up(series_sum_from(1, consts, SeriesKind::Beta));
    let beta_n_plus = up(series_sum_from(n + 1, consts, SeriesKind::Beta));

    let bound = (alpha_n_plus < alpha_minus).then(|| {
        // gap is a lower estimate, so deflate it
        let gap = down(Float::with_val(prec, &alpha_minus - &alpha_n_plus));
        let first = Float::with_val(prec, &beta_n_plus / &gap);
        let mut second = Float::with_val(prec, &alpha_n_plus * &beta_plus);
        second /= &alpha_minus;
        second /= &gap;
        up(first + second)
    });

    BoundReport {
        n,
        alpha_minus,
        alpha_plus,
        alpha_n_plus,
        beta_plus,
        beta_n_plus,
        bound,
        used_weighted_birkhoff: consts.m > 2,
    }
}
