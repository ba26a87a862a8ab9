//! Trace sums over products of length `n` and the determinant coefficients
//! built from them.
//!
//! For a word `A = A_{i_1} ... A_{i_n}` with weight `p_A = p_{i_1} ... p_{i_n}`
//! the level-`n` sums are
//!
//! ```text
//! t_n   = sum_A p_A / (1 - l2(A)/l1(A))
//! tau_n = sum_A p_A log l1(A) / (1 - l2(A)/l1(A))
//! ```
//!
//! where `l1 > |l2|` are the eigenvalues of the product.

use rayon::prelude::*;
use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::matrix::{Ensemble, PositiveMatrix2};

/// Default cap on `k^N`, the number of words at the deepest level.
pub const DEFAULT_WORD_CAP: u64 = 1 << 26;

/// Subtrees are handed to workers once there are at least this many prefixes.
const MIN_PARALLEL_PREFIXES: u128 = 64;

/// How words are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Enumeration {
    /// Every one of the `k^n` words, each evaluated separately.
    Exhaustive,
    /// One representative per cyclic-rotation class, weighted by the class
    /// size. Rotations of a word are similar matrices with the same weight,
    /// so this gives the same sums with roughly `n` times fewer logarithms.
    #[default]
    Necklaces,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceOptions {
    pub word_cap: u64,
    pub enumeration: Enumeration,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            word_cap: DEFAULT_WORD_CAP,
            enumeration: Enumeration::default(),
        }
    }
}

/// `t_n` and `tau_n` for `n = 1..=max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceData {
    t: Vec<Float>,
    tau: Vec<Float>,
}

impl TraceData {
    /// Wraps precomputed sequences; element `i` holds level `i + 1`.
    pub fn from_parts(t: Vec<Float>, tau: Vec<Float>) -> Result<Self> {
        if t.is_empty() || t.len() != tau.len() {
            return Err(Error::InvalidArgument(
                "t and tau must be non-empty and equally long".into(),
            ));
        }
        Ok(Self { t, tau })
    }

    pub fn max_n(&self) -> u32 {
        self.t.len() as u32
    }

    pub fn precision(&self) -> u32 {
        self.t[0].prec()
    }

    /// `t_n`, for `1 <= n <= max_n`.
    pub fn t(&self, n: u32) -> &Float {
        &self.t[n as usize - 1]
    }

    /// `tau_n`, for `1 <= n <= max_n`.
    pub fn tau(&self, n: u32) -> &Float {
        &self.tau[n as usize - 1]
    }
}

pub fn compute_traces(e: &Ensemble, max_n: u32) -> Result<TraceData> {
    compute_traces_with(e, max_n, &TraceOptions::default())
}

pub fn compute_traces_with(e: &Ensemble, max_n: u32, opts: &TraceOptions) -> Result<TraceData> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let k = e.len() as u128;
    let words = k.checked_pow(max_n).unwrap_or(u128::MAX);
    if words > u128::from(opts.word_cap) {
        return Err(Error::BudgetExceeded {
            words,
            cap: opts.word_cap,
        });
    }

    let max_n = max_n as usize;
    let split = split_depth(e.len(), max_n);
    let walker = Walker::new(e, max_n, opts.enumeration);

    // Levels shallower than the split are summed on the calling thread;
    // each prefix of length `split` owns its whole subtree.
    let mut head = Sums::new(max_n, e.precision());
    let mut frontier = Vec::new();
    walker.walk(&mut head, split, |node| frontier.push(node));

    let partials: Vec<Sums> = frontier
        .into_par_iter()
        .map(|root| {
            let mut sums = Sums::new(max_n, e.precision());
            walker.walk_subtree(&mut sums, root);
            sums
        })
        .collect();

    // Fixed merge order: by prefix, in lexicographic order.
    for part in &partials {
        for level in split - 1..max_n {
            head.t[level] += &part.t[level];
            head.tau[level] += &part.tau[level];
        }
    }
    Ok(TraceData {
        t: head.t,
        tau: head.tau,
    })
}

fn split_depth(k: usize, max_n: usize) -> usize {
    let mut depth = 1;
    let mut count = k as u128;
    while count < MIN_PARALLEL_PREFIXES && depth < max_n && k > 1 {
        depth += 1;
        count *= k as u128;
    }
    depth.min(max_n)
}

struct Sums {
    t: Vec<Float>,
    tau: Vec<Float>,
}

impl Sums {
    fn new(levels: usize, prec: u32) -> Self {
        Self {
            t: vec![Float::new(prec); levels],
            tau: vec![Float::new(prec); levels],
        }
    }
}

/// A visited word together with its product, determinant and weight.
#[derive(Clone)]
struct Node {
    word: Vec<usize>,
    product: PositiveMatrix2,
    det: Float,
    weight: Float,
    /// Smallest period of the word as a prenecklace (necklace mode only).
    period: usize,
}

struct Walker<'a> {
    ensemble: &'a Ensemble,
    dets: Vec<Float>,
    max_n: usize,
    mode: Enumeration,
}

impl<'a> Walker<'a> {
    fn new(ensemble: &'a Ensemble, max_n: usize, mode: Enumeration) -> Self {
        let dets = ensemble
            .matrices()
            .iter()
            .map(PositiveMatrix2::det)
            .collect();
        Self {
            ensemble,
            dets,
            max_n,
            mode,
        }
    }

    fn roots(&self) -> impl Iterator<Item = Node> + '_ {
        self.ensemble
            .matrices()
            .iter()
            .enumerate()
            .map(move |(j, m)| Node {
                word: vec![j],
                product: m.clone(),
                det: self.dets[j].clone(),
                weight: self.ensemble.probabilities()[j].clone(),
                period: 1,
            })
    }

    /// Visits every word shorter than `split` and hands each word of length
    /// `split` to `emit` without visiting it.
    fn walk(&self, sums: &mut Sums, split: usize, mut emit: impl FnMut(Node)) {
        for root in self.roots() {
            self.walk_head(sums, root, split, &mut emit);
        }
    }

    fn walk_head(&self, sums: &mut Sums, node: Node, split: usize, emit: &mut impl FnMut(Node)) {
        if node.word.len() == split {
            emit(node);
            return;
        }
        self.contribute(sums, &node);
        for j in 0..self.ensemble.len() {
            if let Some(period) = self.child_period(&node, j) {
                let child = self.child(&node, j, period);
                self.walk_head(sums, child, split, emit);
            }
        }
    }

    /// Depth-first traversal of the subtree under `root`, reusing one scratch
    /// node per depth.
    fn walk_subtree(&self, sums: &mut Sums, root: Node) {
        let base = root.word.len();
        let mut stack: Vec<Node> = vec![root.clone(); self.max_n - base + 1];
        stack[0] = root;
        self.descend(sums, &mut stack, 0);
    }

    fn descend(&self, sums: &mut Sums, stack: &mut [Node], depth: usize) {
        self.contribute(sums, &stack[depth]);
        if stack[depth].word.len() == self.max_n {
            return;
        }
        for j in 0..self.ensemble.len() {
            {
                let (lower, upper) = stack.split_at_mut(depth + 1);
                let node = &lower[depth];
                let Some(period) = self.child_period(node, j) else {
                    continue;
                };
                let child = &mut upper[0];
                child.word.clear();
                child.word.extend_from_slice(&node.word);
                child.word.push(j);
                child
                    .product
                    .mul_assign_right(&node.product, &self.ensemble.matrices()[j]);
                child.det.assign(&node.det * &self.dets[j]);
                child
                    .weight
                    .assign(&node.weight * &self.ensemble.probabilities()[j]);
                child.period = period;
            }
            self.descend(sums, stack, depth + 1);
        }
    }

    fn child(&self, node: &Node, j: usize, period: usize) -> Node {
        let mut word = node.word.clone();
        word.push(j);
        Node {
            word,
            product: node.product.mul(&self.ensemble.matrices()[j]),
            det: Float::with_val(node.det.prec(), &node.det * &self.dets[j]),
            weight: Float::with_val(
                node.weight.prec(),
                &node.weight * &self.ensemble.probabilities()[j],
            ),
            period,
        }
    }

    /// `Some(period)` if appending `j` keeps the word in the traversal.
    fn child_period(&self, node: &Node, j: usize) -> Option<usize> {
        match self.mode {
            Enumeration::Exhaustive => Some(1),
            Enumeration::Necklaces => {
                let len = node.word.len();
                let reference = node.word[len - node.period];
                match j.cmp(&reference) {
                    std::cmp::Ordering::Less => None,
                    std::cmp::Ordering::Equal => Some(node.period),
                    std::cmp::Ordering::Greater => Some(len + 1),
                }
            }
        }
    }

    fn contribute(&self, sums: &mut Sums, node: &Node) {
        let len = node.word.len();
        let multiplicity = match self.mode {
            Enumeration::Exhaustive => 1,
            Enumeration::Necklaces if len.is_multiple_of(node.period) => node.period,
            Enumeration::Necklaces => return,
        };
        let prec = node.det.prec();
        let lambda1 = node.product.perron_root();
        // l2 / l1 = det / l1^2, with det carried multiplicatively
        let mut ratio = Float::with_val(prec, lambda1.square_ref());
        ratio.recip_mut();
        ratio *= &node.det;
        // |l2/l1| < 1 keeps each term below p_A / (1 - |l2/l1|)
        debug_assert!(
            Float::with_val(prec, ratio.abs_ref()) < 1,
            "|l2/l1| < 1 for positive matrices"
        );
        let mut factor = Float::with_val(prec, 1u32 - &ratio);
        factor.recip_mut();
        factor *= &node.weight;
        if multiplicity > 1 {
            factor *= multiplicity as u32;
        }
        let log_l1 = lambda1.ln();
        sums.tau[len - 1] += Float::with_val(prec, &factor * &log_l1);
        sums.t[len - 1] += &factor;
    }
}

/// `a_n = b_n(0)` and `alpha_n = b_n'(0)` for `n = 0..=max_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetCoefficients {
    pub a: Vec<Float>,
    pub alpha: Vec<Float>,
}

impl DetCoefficients {
    pub fn max_n(&self) -> u32 {
        (self.a.len() - 1) as u32
    }
}

/// Taylor coefficients of `det(Id - z L_t)` at `t = 0` and their
/// `t`-derivatives, via the recursions
///
/// ```text
/// a_0 = 1,     a_n     = -(1/n) sum_{m=1..n} t_m a_{n-m}
/// alpha_0 = 0, alpha_n = -(1/n) sum_{m=1..n} (tau_m a_{n-m} + t_m alpha_{n-m})
/// ```
///
/// obtained from `det(Id - z L) = exp(-sum_n z^n tr(L^n) / n)`.
pub fn det_coefficients(td: &TraceData) -> DetCoefficients {
    let prec = td.precision();
    let max_n = td.max_n() as usize;
    let mut a = Vec::with_capacity(max_n + 1);
    let mut alpha = Vec::with_capacity(max_n + 1);
    a.push(Float::with_val(prec, 1));
    alpha.push(Float::with_val(prec, 0));
    let mut term = Float::new(prec);
    for n in 1..=max_n {
        let mut an = Float::new(prec);
        let mut alphan = Float::new(prec);
        for m in 1..=n {
            let (t, tau) = (td.t(m as u32), td.tau(m as u32));
            term.assign(t * &a[n - m]);
            an += &term;
            term.assign(tau * &a[n - m]);
            alphan += &term;
            term.assign(t * &alpha[n - m]);
            alphan += &term;
        }
        an /= n as u32;
        alphan /= n as u32;
        a.push(-an);
        alpha.push(-alphan);
    }
    DetCoefficients { a, alpha }
}

/// Largest `n` accepted by [`composition_sum_oracle`].
pub const ORACLE_MAX_N: u32 = 8;

/// Literal evaluation of the composition-sum formulas for `a_n` and
/// `alpha_n`, summing over all `2^(n-1)` ordered compositions of `n`.
/// Exponential cost; test use only.
pub fn composition_sum_oracle(td: &TraceData, n: u32) -> Result<(Float, Float)> {
    if n > ORACLE_MAX_N {
        return Err(Error::OracleTooLarge(n));
    }
    if n == 0 || n > td.max_n() {
        return Err(Error::InvalidArgument(format!(
            "n = {n} outside 1..={}",
            td.max_n()
        )));
    }
    let prec = td.precision();
    let mut a = Float::with_val(prec, 0);
    let mut alpha = Float::with_val(prec, 0);
    for mask in 0u32..(1 << (n - 1)) {
        // bit i set => a cut after position i + 1
        let mut parts = Vec::new();
        let mut start = 0;
        for i in 0..n - 1 {
            if mask & (1 << i) != 0 {
                parts.push(i + 1 - start);
                start = i + 1;
            }
        }
        parts.push(n - start);

        let l = parts.len() as u32;
        let mut coeff = Float::with_val(prec, 1);
        for i in 2..=l {
            coeff /= i;
        }
        if l % 2 == 1 {
            coeff = -coeff;
        }

        let ratio = |x: &Float, part: u32| Float::with_val(prec, x / part);
        let mut prod = Float::with_val(prec, 1);
        for &p in &parts {
            prod *= ratio(td.t(p), p);
        }
        a += Float::with_val(prec, &coeff * &prod);

        let mut mixed = Float::with_val(prec, 0);
        for (j, &pj) in parts.iter().enumerate() {
            let mut term = ratio(td.tau(pj), pj);
            for (m, &pm) in parts.iter().enumerate() {
                if m != j {
                    term *= ratio(td.t(pm), pm);
                }
            }
            mixed += term;
        }
        alpha += mixed * &coeff;
    }
    Ok((a, alpha))
}

/// `Lambda_N = (sum_{n<=N} alpha_n) / (sum_{n<=N} n a_n)`.
pub fn lyapunov_estimate(dc: &DetCoefficients, n: u32) -> Result<Float> {
    if n == 0 || n > dc.max_n() {
        return Err(Error::InvalidArgument(format!(
            "N = {n} outside 1..={}",
            dc.max_n()
        )));
    }
    let prec = dc.a[0].prec();
    let mut num = Float::with_val(prec, 0);
    let mut den = Float::with_val(prec, 0);
    for i in 1..=n as usize {
        num += &dc.alpha[i];
        den += Float::with_val(prec, &dc.a[i] * i as u32);
    }
    let floor = Float::with_val(prec, Float::i_exp(1, -((prec / 2) as i32)));
    if Float::with_val(prec, den.abs_ref()) < floor {
        return Err(Error::DegenerateDenominator(n));
    }
    Ok(num / den)
}

/// `Lambda_1, ..., Lambda_N`.
pub fn lyapunov_estimates(dc: &DetCoefficients) -> Result<Vec<Float>> {
    (1..=dc.max_n()).map(|n| lyapunov_estimate(dc, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate_ensemble;
    use rug::Rational;

    const P: u32 = 256;

    fn ints(m: [[i64; 2]; 2]) -> [[Rational; 2]; 2] {
        m.map(|row| row.map(Rational::from))
    }

    fn half() -> Rational {
        Rational::from((1, 2))
    }

    fn example_one(prec: u32) -> Ensemble {
        validate_ensemble(
            &[ints([[2, 1], [1, 1]]), ints([[3, 1], [2, 1]])],
            &[half(), half()],
            prec,
        )
        .unwrap()
    }

    fn single(m: [[i64; 2]; 2], prec: u32) -> Ensemble {
        validate_ensemble(&[ints(m)], &[Rational::from(1)], prec).unwrap()
    }

    fn assert_close(x: &Float, y: &Float, bits: i32) {
        let diff = Float::with_val(x.prec(), x - y).abs();
        let scale = Float::with_val(x.prec(), x.abs_ref()).max(&Float::with_val(x.prec(), 1));
        let tol = scale * Float::with_val(x.prec(), Float::i_exp(1, -bits));
        assert!(
            diff <= tol,
            "{} vs {} differ by {}",
            x.to_f64(),
            y.to_f64(),
            diff.to_f64()
        );
    }

    #[test]
    fn single_matrix_level_one() {
        // t_1 = l1 / (l1 - l2) = (3 + sqrt 5) / (2 sqrt 5)
        let td = compute_traces(&single([[2, 1], [1, 1]], P), 1).unwrap();
        let s5 = Float::with_val(P, 5).sqrt();
        let t1 = Float::with_val(P, 3 + &s5) / (Float::with_val(P, 2) * &s5);
        assert_close(td.t(1), &t1, P as i32 - 8);
        let l1 = Float::with_val(P, 3 + &s5) / 2u32;
        assert_close(td.tau(1), &(t1 * l1.ln()), P as i32 - 8);
    }

    #[test]
    fn example_one_level_one() {
        let td = compute_traces(&example_one(P), 1).unwrap();
        let s5 = Float::with_val(P, 5).sqrt();
        let s3 = Float::with_val(P, 3).sqrt();
        let first = Float::with_val(P, 3 + &s5) / (Float::with_val(P, 2) * &s5);
        let second = Float::with_val(P, 2 + &s3) / (Float::with_val(P, 2) * &s3);
        let t1 = (first + second) / 2u32;
        assert_close(td.t(1), &t1, P as i32 - 8);
        assert!((td.t(1).to_f64() - 1.124_085_331_219_78).abs() < 1e-12);
    }

    #[test]
    fn necklaces_match_exhaustive() {
        let e = validate_ensemble(
            &[
                ints([[2, 1], [1, 1]]),
                ints([[3, 1], [2, 1]]),
                ints([[1, 4], [1, 2]]),
            ],
            &[
                Rational::from((1, 5)),
                Rational::from((1, 2)),
                Rational::from((3, 10)),
            ],
            P,
        )
        .unwrap();
        let ex = compute_traces_with(
            &e,
            6,
            &TraceOptions {
                enumeration: Enumeration::Exhaustive,
                ..Default::default()
            },
        )
        .unwrap();
        let nk = compute_traces(&e, 6).unwrap();
        for n in 1..=6 {
            assert_close(ex.t(n), nk.t(n), P as i32 - 24);
            assert_close(ex.tau(n), nk.tau(n), P as i32 - 24);
        }
    }

    #[test]
    fn exhaustive_matches_direct_word_sum() {
        let e = example_one(P);
        let td = compute_traces_with(
            &e,
            3,
            &TraceOptions {
                enumeration: Enumeration::Exhaustive,
                ..Default::default()
            },
        )
        .unwrap();
        // independent: build each length-3 product from scratch
        let mut t3 = Float::with_val(P, 0);
        for w in 0..8usize {
            let ms: Vec<_> = (0..3)
                .map(|i| e.matrices()[(w >> (2 - i)) & 1].clone())
                .collect();
            let m = crate::matrix::product(&ms).unwrap();
            let sp = crate::matrix::spectral_pair(&m);
            let ratio = Float::with_val(P, &sp.lambda2 / &sp.lambda1);
            t3 += Float::with_val(P, 1) / 8u32 / (1u32 - ratio);
        }
        assert_close(td.t(3), &t3, P as i32 - 16);
    }

    #[test]
    fn budget_cap() {
        let opts = TraceOptions {
            word_cap: 1 << 10,
            ..Default::default()
        };
        assert!(compute_traces_with(&example_one(P), 10, &opts).is_ok());
        assert_eq!(
            compute_traces_with(&example_one(P), 11, &opts),
            Err(Error::BudgetExceeded {
                words: 2048,
                cap: 1024
            })
        );
        assert!(compute_traces(&example_one(P), 0).is_err());
    }

    #[test]
    fn recursion_base_cases() {
        let td = compute_traces(&example_one(P), 3).unwrap();
        let dc = det_coefficients(&td);
        assert_eq!(dc.a[0], 1);
        assert!(dc.alpha[0].is_zero());
        assert_eq!(dc.a[1], Float::with_val(P, -td.t(1)));
        assert_eq!(dc.alpha[1], Float::with_val(P, -td.tau(1)));
        let a2 = (Float::with_val(P, td.t(1).square_ref()) - td.t(2)) / 2u32;
        assert_close(&dc.a[2], &a2, P as i32 - 8);
    }

    #[test]
    fn oracle_small_cases() {
        let td = compute_traces(&example_one(P), 3).unwrap();
        let (a1, alpha1) = composition_sum_oracle(&td, 1).unwrap();
        assert_eq!(a1, Float::with_val(P, -td.t(1)));
        assert_eq!(alpha1, Float::with_val(P, -td.tau(1)));
        let (a2, _) = composition_sum_oracle(&td, 2).unwrap();
        let expect =
            Float::with_val(P, td.t(1).square_ref()) / 2u32 - Float::with_val(P, td.t(2) / 2u32);
        assert_close(&a2, &expect, P as i32 - 8);
        assert_eq!(
            composition_sum_oracle(&td, 9),
            Err(Error::OracleTooLarge(9))
        );
        assert!(composition_sum_oracle(&td, 4).is_err());
    }

    #[test]
    fn oracle_matches_recursion_example_one() {
        let td = compute_traces(&example_one(P), 6).unwrap();
        let dc = det_coefficients(&td);
        for n in 1..=6 {
            let (a, alpha) = composition_sum_oracle(&td, n).unwrap();
            assert_close(&dc.a[n as usize], &a, P as i32 - 32);
            assert_close(&dc.alpha[n as usize], &alpha, P as i32 - 32);
        }
    }

    #[test]
    fn single_matrix_estimate_is_log_perron_root() {
        let e = single([[2, 1], [1, 1]], P);
        let dc = det_coefficients(&compute_traces(&e, 5).unwrap());
        let expect = crate::matrix::spectral_pair(&e.matrices()[0]).lambda1.ln();
        for lam in lyapunov_estimates(&dc).unwrap() {
            assert_close(&lam, &expect, P as i32 - 32);
        }
    }

    #[test]
    fn estimate_range_and_degenerate_denominator() {
        let dc = DetCoefficients {
            a: vec![Float::with_val(P, 1), Float::with_val(P, 0)],
            alpha: vec![Float::with_val(P, 0), Float::with_val(P, 1)],
        };
        assert_eq!(
            lyapunov_estimate(&dc, 1),
            Err(Error::DegenerateDenominator(1))
        );
        assert!(lyapunov_estimate(&dc, 0).is_err());
        assert!(lyapunov_estimate(&dc, 2).is_err());
    }

    #[test]
    fn example_one_level_one_matches_table() {
        let dc = det_coefficients(&compute_traces(&example_one(512), 1).unwrap());
        let lam = lyapunov_estimate(&dc, 1).unwrap();
        let s = lam.to_string_radix(10, Some(45));
        assert!(
            s.starts_with("1.13232070135929844858181319123195491691"),
            "{s}"
        );
    }
}
