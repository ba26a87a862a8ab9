//! Diagonal change of basis minimizing the column-ratio constant `r`.
//!
//! Conjugating every matrix by `diag(l, 1/l)` maps `[[a, b], [c, d]]` to
//! `[[a, u b], [c / u, d]]` with `u = l^2`, and leaves the eigenvalues of every
//! product (hence every `Lambda_N`) unchanged. With
//! `P = max_i max(a_i/c_i, b_i/d_i)` and `Q = max_i max(c_i/a_i, d_i/b_i)`
//! the ratio bound is `R_u = max(u P, Q / u)`: one branch increases in `u`,
//! the other decreases, so the minimum sits at their crossing
//! `u* = sqrt(Q / P)` with `R = sqrt(P Q)`.

use rug::Float;

use crate::matrix::{compute_constants, Ensemble, EnsembleConstants};

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingResult {
    /// Optimal conjugation parameter `l0 > 0`.
    pub lambda0: Float,
    /// The minimized ratio bound `max_i R_i` after conjugation.
    pub ratio_bound: Float,
    pub scaled: Ensemble,
    pub new_constants: EnsembleConstants,
    /// All conjugated matrices are column stochastic, so `Lambda = 0`.
    pub is_stochastic_after: bool,
}

/// `R_l = max_i { a_i l^2 / c_i, c_i / (a_i l^2), l^2 b_i / d_i, d_i / (l^2 b_i) }`.
pub fn scaling_ratio(e: &Ensemble, lambda: &Float) -> Float {
    let prec = e.precision();
    let u = Float::with_val(prec, lambda.square_ref());
    let mut best = Float::with_val(prec, 0);
    for m in e.matrices() {
        let ac = Float::with_val(prec, m.a() / m.c()) * &u;
        let bd = Float::with_val(prec, m.b() / m.d()) * &u;
        for x in [ac, bd] {
            best.max_mut(&Float::with_val(prec, x.recip_ref()));
            best.max_mut(&x);
        }
    }
    best
}

pub fn optimal_scaling(e: &Ensemble) -> ScalingResult {
    let prec = e.precision();
    let mut p = Float::with_val(prec, 0);
    let mut q = Float::with_val(prec, 0);
    for m in e.matrices() {
        let ac = Float::with_val(prec, m.a() / m.c());
        let bd = Float::with_val(prec, m.b() / m.d());
        q.max_mut(&Float::with_val(prec, ac.recip_ref()));
        q.max_mut(&Float::with_val(prec, bd.recip_ref()));
        p.max_mut(&ac);
        p.max_mut(&bd);
    }
    let u = Float::with_val(prec, &q / &p).sqrt();
    let lambda0 = Float::with_val(prec, u.sqrt_ref());
    let ratio_bound = Float::with_val(prec, &p * &q).sqrt();
    let scaled = e.conjugated(&lambda0);
    let new_constants = compute_constants(&scaled);
    let is_stochastic_after = new_constants.is_all_column_stochastic;
    ScalingResult {
        lambda0,
        ratio_bound,
        scaled,
        new_constants,
        is_stochastic_after,
    }
}
