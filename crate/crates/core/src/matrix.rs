//! Positive 2x2 matrices, ensembles `(matrices, probabilities)` and the
//! effective constants that drive the error analysis.
//!
//! Every value carries its own MPFR precision; everything derived from an
//! [`Ensemble`] is computed at the ensemble's precision.

use std::fmt;

use rug::float::Constant;
use rug::{Assign, Float, Rational};

use crate::error::{Error, Result};
use crate::exact::to_float;

/// Default working precision in mantissa bits.
pub const DEFAULT_PRECISION: u32 = 512;

/// Relative slack used when checking probability sums and column sums.
pub fn tolerance(prec: u32) -> Float {
    let exp = i32::try_from(prec.saturating_sub(16).max(1)).unwrap_or(i32::MAX);
    Float::with_val(prec, Float::i_exp(1, -exp))
}

/// A 2x2 matrix `[[a, b], [c, d]]` with strictly positive entries and
/// non-zero determinant.
#[derive(Clone, PartialEq)]
pub struct PositiveMatrix2 {
    a: Float,
    b: Float,
    c: Float,
    d: Float,
}

impl fmt::Debug for PositiveMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.a.to_f64(),
            self.b.to_f64(),
            self.c.to_f64(),
            self.d.to_f64()
        )
    }
}

impl PositiveMatrix2 {
    pub fn new(a: Float, b: Float, c: Float, d: Float) -> Result<Self> {
        Self::checked(0, a, b, c, d)
    }

    fn checked(index: usize, a: Float, b: Float, c: Float, d: Float) -> Result<Self> {
        for (pos, v) in [&a, &b, &c, &d].into_iter().enumerate() {
            if !(v.is_finite() && v.is_sign_positive() && !v.is_zero()) {
                return Err(Error::NonPositiveEntry {
                    matrix: index,
                    row: pos / 2,
                    col: pos % 2,
                });
            }
        }
        let m = Self { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::SingularMatrix { matrix: index });
        }
        Ok(m)
    }

    /// Builds a matrix from exact entries. Positivity and invertibility are
    /// decided exactly before rounding to `prec` bits.
    pub fn from_rationals(entries: &[[Rational; 2]; 2], prec: u32) -> Result<Self> {
        Self::from_rationals_indexed(0, entries, prec)
    }

    fn from_rationals_indexed(index: usize, e: &[[Rational; 2]; 2], prec: u32) -> Result<Self> {
        for (row, line) in e.iter().enumerate() {
            for (col, v) in line.iter().enumerate() {
                if *v <= 0 {
                    return Err(Error::NonPositiveEntry {
                        matrix: index,
                        row,
                        col,
                    });
                }
            }
        }
        let det = Rational::from(&e[0][0] * &e[1][1]) - Rational::from(&e[0][1] * &e[1][0]);
        if det == 0 {
            return Err(Error::SingularMatrix { matrix: index });
        }
        Self::checked(
            index,
            to_float(&e[0][0], prec),
            to_float(&e[0][1], prec),
            to_float(&e[1][0], prec),
            to_float(&e[1][1], prec),
        )
    }

    /// Convenience constructor for small integer matrices.
    pub fn from_ints(entries: [[i64; 2]; 2], prec: u32) -> Result<Self> {
        let e = entries.map(|row| row.map(Rational::from));
        Self::from_rationals(&e, prec)
    }

    pub fn a(&self) -> &Float {
        &self.a
    }
    pub fn b(&self) -> &Float {
        &self.b
    }
    pub fn c(&self) -> &Float {
        &self.c
    }
    pub fn d(&self) -> &Float {
        &self.d
    }

    pub fn precision(&self) -> u32 {
        self.a.prec()
    }

    pub fn trace(&self) -> Float {
        Float::with_val(self.precision(), &self.a + &self.d)
    }

    pub fn det(&self) -> Float {
        let prec = self.precision();
        let ad = Float::with_val(prec, &self.a * &self.d);
        let bc = Float::with_val(prec, &self.b * &self.c);
        ad - bc
    }

    /// Column sums `(a + c, b + d)`.
    pub fn column_sums(&self) -> (Float, Float) {
        let prec = self.precision();
        (
            Float::with_val(prec, &self.a + &self.c),
            Float::with_val(prec, &self.b + &self.d),
        )
    }

    /// `self * rhs`. Products of positive matrices stay positive, so no
    /// re-validation happens here.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        out.mul_assign_right(self, rhs);
        out
    }

    /// Overwrites `self` with `lhs * rhs`, reusing the existing allocations.
    pub(crate) fn mul_assign_right(&mut self, lhs: &Self, rhs: &Self) {
        let prec = self.precision();
        let mut tmp = Float::new(prec);
        self.a.assign(&lhs.a * &rhs.a);
        tmp.assign(&lhs.b * &rhs.c);
        self.a += &tmp;
        self.b.assign(&lhs.a * &rhs.b);
        tmp.assign(&lhs.b * &rhs.d);
        self.b += &tmp;
        self.c.assign(&lhs.c * &rhs.a);
        tmp.assign(&lhs.d * &rhs.c);
        self.c += &tmp;
        self.d.assign(&lhs.c * &rhs.b);
        tmp.assign(&lhs.d * &rhs.d);
        self.d += &tmp;
    }

    /// `factor * self`, for `factor > 0`.
    pub fn scaled(&self, factor: &Float) -> Self {
        let prec = self.precision();
        let s = |v: &Float| Float::with_val(prec, v * factor);
        Self {
            a: s(&self.a),
            b: s(&self.b),
            c: s(&self.c),
            d: s(&self.d),
        }
    }

    /// Diagonal conjugation `diag(l, 1/l) * self * diag(1/l, l)`, i.e. the
    /// matrix `[[a, l^2 b], [c / l^2, d]]`.
    pub fn conjugated(&self, lambda: &Float) -> Self {
        let prec = self.precision();
        let u = Float::with_val(prec, lambda.square_ref());
        Self {
            a: self.a.clone(),
            b: Float::with_val(prec, &self.b * &u),
            c: Float::with_val(prec, &self.c / &u),
            d: self.d.clone(),
        }
    }

    /// Perron root `(tr + sqrt((a - d)^2 + 4bc)) / 2`.
    ///
    /// The discriminant is written in its manifestly positive form instead of
    /// `tr^2 - 4 det`, which would cancel for nearly rank-one products.
    pub fn perron_root(&self) -> Float {
        let prec = self.precision();
        let mut disc = Float::with_val(prec, &self.a - &self.d);
        disc.square_mut();
        let bc = Float::with_val(prec, &self.b * &self.c);
        disc += bc * 4u32;
        disc.sqrt_mut();
        disc += &self.a;
        disc += &self.d;
        disc / 2u32
    }

    /// Whether both columns sum to one within `tolerance(prec)`.
    pub fn is_column_stochastic(&self) -> bool {
        let tol = tolerance(self.precision());
        let (s1, s2) = self.column_sums();
        [s1, s2]
            .iter()
            .all(|s| Float::with_val(s.prec(), s - 1u32).abs() < tol)
    }
}

/// The two real eigenvalues of a positive matrix, `lambda1 > |lambda2|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPair {
    pub lambda1: Float,
    pub lambda2: Float,
}

pub fn spectral_pair(m: &PositiveMatrix2) -> SpectralPair {
    let lambda1 = m.perron_root();
    let lambda2 = m.det() / &lambda1;
    SpectralPair { lambda1, lambda2 }
}

/// Left-to-right product `ms[0] * ms[1] * ... `. `None` for an empty slice.
pub fn product(ms: &[PositiveMatrix2]) -> Option<PositiveMatrix2> {
    let (first, rest) = ms.split_first()?;
    let mut acc = first.clone();
    let mut scratch = first.clone();
    for m in rest {
        scratch.mul_assign_right(&acc, m);
        std::mem::swap(&mut acc, &mut scratch);
    }
    Some(acc)
}

/// A validated pair `(matrices, probabilities)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    matrices: Vec<PositiveMatrix2>,
    probabilities: Vec<Float>,
    prec: u32,
}

/// Validates exact input and rounds it once to `prec` bits.
pub fn validate_ensemble(
    matrices: &[[[Rational; 2]; 2]],
    probabilities: &[Rational],
    prec: u32,
) -> Result<Ensemble> {
    if matrices.is_empty() {
        return Err(Error::BadProbabilityVector(
            "at least one matrix is required".into(),
        ));
    }
    if matrices.len() != probabilities.len() {
        return Err(Error::BadProbabilityVector(format!(
            "{} matrices but {} probabilities",
            matrices.len(),
            probabilities.len()
        )));
    }
    let ms = matrices
        .iter()
        .enumerate()
        .map(|(i, m)| PositiveMatrix2::from_rationals_indexed(i, m, prec))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = probabilities.iter().position(|p| *p <= 0) {
        return Err(Error::BadProbabilityVector(format!(
            "p[{i}] is not strictly positive"
        )));
    }
    let sum: Rational = probabilities.iter().sum();
    let gap = Float::with_val(prec, Rational::from(&sum - 1u32).abs());
    if gap > tolerance(prec) {
        return Err(Error::BadProbabilityVector(format!(
            "probabilities sum to {} instead of 1",
            Float::with_val(64, &sum)
        )));
    }
    let ps = probabilities.iter().map(|p| to_float(p, prec)).collect();
    Ok(Ensemble {
        matrices: ms,
        probabilities: ps,
        prec,
    })
}

impl Ensemble {
    /// Builds an ensemble from already-rounded values, applying the same checks
    /// as [`validate_ensemble`] at the values' precision.
    pub fn from_floats(matrices: Vec<PositiveMatrix2>, probabilities: Vec<Float>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::BadProbabilityVector(
                "at least one matrix is required".into(),
            ));
        };
        let prec = first.precision();
        if matrices.len() != probabilities.len() {
            return Err(Error::BadProbabilityVector(format!(
                "{} matrices but {} probabilities",
                matrices.len(),
                probabilities.len()
            )));
        }
        for (i, m) in matrices.iter().enumerate() {
            if m.det().is_zero() {
                return Err(Error::SingularMatrix { matrix: i });
            }
        }
        if let Some(i) = probabilities
            .iter()
            .position(|p| !(p.is_finite() && *p > 0))
        {
            return Err(Error::BadProbabilityVector(format!(
                "p[{i}] is not strictly positive"
            )));
        }
        let mut sum = Float::with_val(prec, 0);
        for p in &probabilities {
            sum += p;
        }
        sum -= 1u32;
        if sum.abs() > tolerance(prec) {
            return Err(Error::BadProbabilityVector(
                "probabilities do not sum to 1".into(),
            ));
        }
        Ok(Self {
            matrices,
            probabilities,
            prec,
        })
    }

    pub fn matrices(&self) -> &[PositiveMatrix2] {
        &self.matrices
    }

    pub fn probabilities(&self) -> &[Float] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Every matrix multiplied by `factor > 0`.
    pub fn scaled(&self, factor: &Float) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.scaled(factor)).collect(),
            probabilities: self.probabilities.clone(),
            prec: self.prec,
        }
    }

    /// Every matrix conjugated by `diag(lambda, 1/lambda)`.
    pub fn conjugated(&self, lambda: &Float) -> Self {
        Self {
            matrices: self.matrices.iter().map(|m| m.conjugated(lambda)).collect(),
            probabilities: self.probabilities.clone(),
            prec: self.prec,
        }
    }

    /// Reorders the `(matrix, probability)` pairs; `order` must be a
    /// permutation of `0..len`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len(), "order must be a permutation");
        Self {
            matrices: order.iter().map(|&i| self.matrices[i].clone()).collect(),
            probabilities: order
                .iter()
                .map(|&i| self.probabilities[i].clone())
                .collect(),
            prec: self.prec,
        }
    }

    pub fn is_all_column_stochastic(&self) -> bool {
        self.matrices
            .iter()
            .all(PositiveMatrix2::is_column_stochastic)
    }
}

/// Constants of the effective error analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConstants {
    /// Max over column sums and their reciprocals.
    pub c1: Float,
    /// Per-matrix column-ratio bound `R_i`.
    pub column_ratio: Vec<Float>,
    /// `max_i (R_i - 1) / (R_i + 1)`.
    pub r: Float,
    /// Max argument of the cone image, in `[0, pi/2)`.
    pub theta: Float,
    /// `sqrt(log(c1)^2 + theta^2)`.
    pub c2: Float,
    /// `1 / (r sqrt(1 - r^2))`.
    pub c0: Float,
    /// Birkhoff contraction coefficient of each matrix.
    pub tau_per_matrix: Vec<Float>,
    /// Probability-weighted Birkhoff coefficient `s`.
    pub tau_weighted: Float,
    /// Least `M >= 2` with `c0 r^((M+1)/2) < 1`.
    pub m: u32,
    pub is_all_column_stochastic: bool,
}

impl EnsembleConstants {
    pub fn precision(&self) -> u32 {
        self.r.prec()
    }

    /// The same constants with `theta` replaced (and `c2` recomputed).
    /// Passing `pi/2` gives the theta-free variant of the bound.
    pub fn with_theta(&self, theta: Float) -> Self {
        let mut out = self.clone();
        out.c2 = c2_of(&self.c1, &theta);
        out.theta = theta;
        out
    }

    /// Constants with `theta = pi / 2`.
    pub fn with_worst_case_theta(&self) -> Self {
        let half_pi = Float::with_val(self.precision(), Constant::Pi) / 2u32;
        self.with_theta(half_pi)
    }
}

fn c2_of(c1: &Float, theta: &Float) -> Float {
    let prec = c1.prec();
    let mut l = Float::with_val(prec, c1.ln_ref());
    l.square_mut();
    l += Float::with_val(prec, theta.square_ref());
    l.sqrt()
}

/// `(1 - sqrt(psi)) / (1 + sqrt(psi))` with `psi = min(ad/bc, bc/ad)`.
pub fn birkhoff_coefficient(m: &PositiveMatrix2) -> Float {
    let prec = m.precision();
    let ad = Float::with_val(prec, m.a() * m.d());
    let bc = Float::with_val(prec, m.b() * m.c());
    let psi = if ad < bc { ad / bc } else { bc / ad };
    let root = psi.sqrt();
    Float::with_val(prec, 1u32 - &root) / (root + 1u32)
}

/// `R_i`: the least `R` with `1/R <= a/c <= R` and `1/R <= b/d <= R`.
pub fn column_ratio_bound(m: &PositiveMatrix2) -> Float {
    let prec = m.precision();
    let ratio = |x: &Float, y: &Float| {
        let q = Float::with_val(prec, x / y);
        if q < 1 {
            q.recip()
        } else {
            q
        }
    };
    ratio(m.a(), m.c()).max(&ratio(m.b(), m.d()))
}

/// The least `M >= 2` with `c0 * r^((M+1)/2) < 1`, by linear scan.
pub fn minimal_m(c0: &Float, r: &Float) -> u32 {
    let prec = r.prec();
    let root = Float::with_val(prec, r.sqrt_ref());
    // c0 * r^(3/2)
    let mut value = Float::with_val(prec, r * &root) * c0;
    let mut m = 2u32;
    while value >= 1 {
        value *= &root;
        m += 1;
    }
    m
}

pub fn compute_constants(e: &Ensemble) -> EnsembleConstants {
    let prec = e.precision();
    let one = Float::with_val(prec, 1);

    let mut c1 = one.clone();
    let mut theta = Float::with_val(prec, 0);
    let mut column_ratio = Vec::with_capacity(e.len());
    let mut tau_per_matrix = Vec::with_capacity(e.len());
    let mut r = Float::with_val(prec, 0);
    for m in e.matrices() {
        let (s1, s2) = m.column_sums();
        for s in [&s1, &s2] {
            c1.max_mut(s);
            c1.max_mut(&Float::with_val(prec, s.recip_ref()));
        }

        let total = Float::with_val(prec, &s1 + &s2);
        let skew = Float::with_val(prec, &s1 - &s2).abs();
        theta.max_mut(&(skew / total).asin());

        let big_r = column_ratio_bound(m);
        let ri = Float::with_val(prec, &big_r - 1u32) / Float::with_val(prec, &big_r + 1u32);
        r.max_mut(&ri);
        column_ratio.push(big_r);
        tau_per_matrix.push(birkhoff_coefficient(m));
    }

    let mut tau_weighted = Float::with_val(prec, 0);
    for (p, t) in e.probabilities().iter().zip(&tau_per_matrix) {
        tau_weighted += Float::with_val(prec, p * t);
    }

    let c2 = c2_of(&c1, &theta);
    let one_minus_r2 = Float::with_val(prec, 1u32 - Float::with_val(prec, r.square_ref()));
    let c0 = Float::with_val(prec, &r * one_minus_r2.sqrt()).recip();
    let m = minimal_m(&c0, &r);

    EnsembleConstants {
        c1,
        column_ratio,
        r,
        theta,
        c2,
        c0,
        tau_per_matrix,
        tau_weighted,
        m,
        is_all_column_stochastic: e.is_all_column_stochastic(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::parse_exact;
    use rug::ops::Pow;

    const P: u32 = 256;

    fn close(x: &Float, y: &Float, bits: u32) -> bool {
        let diff = Float::with_val(x.prec(), x - y).abs();
        let scale = Float::with_val(x.prec(), x.abs_ref()).max(&Float::with_val(x.prec(), 1));
        diff <= scale * Float::with_val(x.prec(), Float::i_exp(1, -(bits as i32)))
    }

    fn q(s: &str) -> Rational {
        parse_exact(s).unwrap()
    }

    fn ints(m: [[i64; 2]; 2]) -> [[Rational; 2]; 2] {
        m.map(|row| row.map(Rational::from))
    }

    fn example_one() -> Ensemble {
        validate_ensemble(
            &[ints([[2, 1], [1, 1]]), ints([[3, 1], [2, 1]])],
            &[q("1/2"), q("1/2")],
            P,
        )
        .unwrap()
    }

    #[test]
    fn validation_errors() {
        let err = validate_ensemble(&[ints([[1, 1], [1, 1]])], &[q("1")], P).unwrap_err();
        assert_eq!(err, Error::SingularMatrix { matrix: 0 });

        let err =
            validate_ensemble(&[ints([[2, 1], [1, 1]])], &[q("0.6"), q("0.6")], P).unwrap_err();
        assert!(matches!(err, Error::BadProbabilityVector(_)));

        let err = validate_ensemble(&[ints([[2, 1], [1, 1]])], &[q("0.6")], P).unwrap_err();
        assert!(matches!(err, Error::BadProbabilityVector(_)));

        let err = validate_ensemble(
            &[ints([[2, 1], [1, 1]]), ints([[2, 0], [1, 1]])],
            &[q("1/2"), q("1/2")],
            P,
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::NonPositiveEntry {
                matrix: 1,
                row: 0,
                col: 1
            }
        );

        let err = validate_ensemble(
            &[ints([[2, 1], [1, 1]]), ints([[2, 1], [1, 1]])],
            &[q("1.5"), q("-0.5")],
            P,
        )
        .unwrap_err();
        assert!(matches!(err, Error::BadProbabilityVector(_)));

        assert!(validate_ensemble(&[], &[], P).is_err());
    }

    #[test]
    fn decimal_thirds_within_tolerance() {
        let third = q(
            "0.33333333333333333333333333333333333333333333333333333333333333333333333333333333333",
        );
        let last = q(
            "0.33333333333333333333333333333333333333333333333333333333333333333333333333333333334",
        );
        let m = ints([[2, 1], [1, 1]]);
        assert!(
            validate_ensemble(&[m.clone(), m.clone(), m], &[third.clone(), third, last], P).is_ok()
        );
    }

    #[test]
    fn spectral_pairs_of_small_matrices() {
        let m = PositiveMatrix2::from_ints([[2, 1], [1, 2]], P).unwrap();
        let sp = spectral_pair(&m);
        assert_eq!(sp.lambda1, 3);
        assert!(close(&sp.lambda2, &Float::with_val(P, 1), P - 4));

        // (3 ± sqrt 5) / 2
        let m = PositiveMatrix2::from_ints([[2, 1], [1, 1]], P).unwrap();
        let sp = spectral_pair(&m);
        let s5 = Float::with_val(P, 5).sqrt();
        assert!(close(
            &sp.lambda1,
            &(Float::with_val(P, 3 + &s5) / 2u32),
            P - 4
        ));
        assert!(close(
            &sp.lambda2,
            &(Float::with_val(P, 3 - &s5) / 2u32),
            P - 4
        ));

        let m = PositiveMatrix2::from_ints([[3, 1], [2, 1]], P).unwrap();
        let sp = spectral_pair(&m);
        let s3 = Float::with_val(P, 3).sqrt();
        assert!(close(&sp.lambda1, &Float::with_val(P, 2 + &s3), P - 4));
        assert!(close(&sp.lambda2, &Float::with_val(P, 2 - &s3), P - 4));
    }

    #[test]
    fn perron_vector_residual() {
        let m = PositiveMatrix2::from_ints([[3, 1], [2, 1]], P).unwrap();
        let l = spectral_pair(&m).lambda1;
        // eigenvector (b, l - a)
        let v0 = m.b().clone();
        let v1 = Float::with_val(P, &l - m.a());
        let r0 = Float::with_val(P, m.a() * &v0) + Float::with_val(P, m.b() * &v1)
            - Float::with_val(P, &l * &v0);
        let r1 = Float::with_val(P, m.c() * &v0) + Float::with_val(P, m.d() * &v1)
            - Float::with_val(P, &l * &v1);
        let tol = Float::with_val(P, Float::i_exp(1, -(P as i32 / 2)));
        assert!(r0.abs() < tol && r1.abs() < tol);
    }

    #[test]
    fn products() {
        let a1 = PositiveMatrix2::from_ints([[2, 1], [1, 1]], P).unwrap();
        let a2 = PositiveMatrix2::from_ints([[3, 1], [2, 1]], P).unwrap();
        assert_eq!(product(std::slice::from_ref(&a1)).unwrap(), a1);
        assert_eq!(
            product(&[a1.clone(), a1.clone()]).unwrap(),
            PositiveMatrix2::from_ints([[5, 3], [3, 2]], P).unwrap()
        );
        assert_eq!(
            product(&[a1.clone(), a2.clone()]).unwrap(),
            PositiveMatrix2::from_ints([[8, 3], [5, 2]], P).unwrap()
        );
        assert_eq!(
            product(&[a1.clone(), a2.clone(), a1.clone()]).unwrap(),
            a1.mul(&a2).mul(&a1)
        );
        assert!(product(&[]).is_none());
    }

    #[test]
    fn example_one_constants() {
        let k = compute_constants(&example_one());
        assert_eq!(k.r, Float::with_val(P, 1) / 3u32);
        assert_eq!(k.column_ratio[0], 2);
        assert_eq!(k.column_ratio[1], 1.5);
        assert_eq!(k.c1, 5);
        let theta = (Float::with_val(P, 3) / 7u32).asin();
        assert!(close(&k.theta, &theta, P - 4));
        assert_eq!(k.m, 2);
        assert!(!k.is_all_column_stochastic);
        assert!(k.tau_weighted <= k.r);
    }

    #[test]
    fn example_two_constants() {
        let e = validate_ensemble(
            &[ints([[3, 1], [1, 3]]), ints([[5, 2], [2, 5]])],
            &[q("1/2"), q("1/2")],
            P,
        )
        .unwrap();
        let k = compute_constants(&e);
        assert_eq!(k.r, 0.5);
        assert!(k.theta.is_zero());
        let s = Float::with_val(P, 13) / 28u32;
        assert!(close(&k.tau_weighted, &s, P - 4));
        // c0 = 4 / sqrt 3 and c0 * (1/2)^(3/2) ~ 0.8165 < 1
        let c0 = Float::with_val(P, 4) / Float::with_val(P, 3).sqrt();
        assert!(close(&k.c0, &c0, P - 4));
        assert_eq!(k.m, 2);
    }

    #[test]
    fn column_stochastic_pair_is_flagged() {
        let e = validate_ensemble(
            &[
                [[q("0.5"), q("0.3")], [q("0.5"), q("0.7")]],
                [[q("0.2"), q("0.6")], [q("0.8"), q("0.4")]],
            ],
            &[q("1/2"), q("1/2")],
            P,
        )
        .unwrap();
        let k = compute_constants(&e);
        assert!(k.is_all_column_stochastic);
        assert!(close(&k.c1, &Float::with_val(P, 1), P - 20));
    }

    #[test]
    fn minimal_m_scan() {
        // c0 r^((M+1)/2) < 1 with r close to 1 needs a large M
        let r = Float::with_val(P, 0.9);
        let c0 = Float::with_val(P, 1u32)
            / (Float::with_val(
                P,
                &r * Float::with_val(P, 1u32 - Float::with_val(P, r.square_ref())).sqrt(),
            ));
        let m = minimal_m(&c0, &r);
        assert!(m > 2);
        assert!(Float::with_val(P, &c0 * Float::with_val(P, r.sqrt_ref()).pow(m + 1)) < 1);
        assert!(Float::with_val(P, &c0 * Float::with_val(P, r.sqrt_ref()).pow(m)) >= 1);
    }

    #[test]
    fn worst_case_theta_increases_c2() {
        let k = compute_constants(&example_one());
        let w = k.with_worst_case_theta();
        assert!(w.c2 > k.c2);
        assert_eq!(w.r, k.r);
    }
}
