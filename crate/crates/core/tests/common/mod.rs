#![allow(dead_code)]

use lyapunov_core::{validate_ensemble, Ensemble};
use rug::{Float, Rational};

pub fn ints(m: [[i64; 2]; 2]) -> [[Rational; 2]; 2] {
    m.map(|row| row.map(Rational::from))
}

pub fn halves(a: [[i64; 2]; 2], b: [[i64; 2]; 2], prec: u32) -> Ensemble {
    let h = Rational::from((1, 2));
    validate_ensemble(&[ints(a), ints(b)], &[h.clone(), h], prec).unwrap()
}

pub fn example_one(prec: u32) -> Ensemble {
    halves([[2, 1], [1, 1]], [[3, 1], [2, 1]], prec)
}

pub fn example_two(prec: u32) -> Ensemble {
    halves([[3, 1], [1, 3]], [[5, 2], [2, 5]], prec)
}

/// `|x - y| <= 2^-bits * max(1, |x|)`.
pub fn close(x: &Float, y: &Float, bits: i32) -> bool {
    let prec = x.prec();
    let diff = Float::with_val(prec, x - y).abs();
    let scale = Float::with_val(prec, x.abs_ref()).max(&Float::with_val(prec, 1));
    diff <= scale * Float::with_val(prec, Float::i_exp(1, -bits))
}

/// Leading `count` significant decimal digits of a value in `[1, 10)`.
pub fn leading_digits(x: &Float, count: usize) -> String {
    let s = x.to_string_radix(10, Some(count + 8));
    s.chars().filter(char::is_ascii_digit).take(count).collect()
}

pub fn table_digits(s: &str, count: usize) -> String {
    s.chars().filter(char::is_ascii_digit).take(count).collect()
}
