//! Exact decimal rendering of multiprecision values.
//!
//! Every conversion goes through the exact rational value of the float, so
//! ties round half to even regardless of binary precision.

use rug::{Float, Integer, Rational};

/// How the last printed digit is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    HalfEven,
    /// Magnitude rounded away from zero; used for upper bounds.
    Up,
}

fn round(q: &Rational, mode: Rounding) -> Integer {
    let floor = Integer::from(q.floor_ref());
    let frac = Rational::from(q - &floor);
    if frac == 0 {
        return floor;
    }
    if mode == Rounding::Up {
        return floor + 1u32;
    }
    let half = Rational::from((1, 2));
    match frac.cmp(&half) {
        std::cmp::Ordering::Less => floor,
        std::cmp::Ordering::Greater => floor + 1u32,
        std::cmp::Ordering::Equal if floor.is_even() => floor,
        std::cmp::Ordering::Equal => floor + 1u32,
    }
}

fn exact(x: &Float) -> Rational {
    x.to_rational().expect("finite value")
}

fn pow10(e: u32) -> Integer {
    Integer::from(Integer::u_pow_u(10, e))
}

/// `x` with exactly `digits` digits after the decimal point.
pub fn fixed(x: &Float, digits: u32) -> String {
    fixed_rational(&exact(x), digits)
}

pub fn fixed_rational(x: &Rational, digits: u32) -> String {
    let scaled = round(&Rational::from(x * pow10(digits)), Rounding::HalfEven);
    let negative = scaled < 0;
    let mut body = scaled.abs().to_string();
    let width = digits as usize + 1;
    if body.len() < width {
        body = format!("{}{body}", "0".repeat(width - body.len()));
    }
    let sign = if negative { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{body}");
    }
    let (int, frac) = body.split_at(body.len() - digits as usize);
    format!("{sign}{int}.{frac}")
}

/// `x` in scientific notation with `significant` digits, e.g. `1.42520e-22`.
pub fn scientific(x: &Float, significant: u32) -> String {
    scientific_with(x, significant, Rounding::HalfEven)
}

pub fn scientific_with(x: &Float, significant: u32, mode: Rounding) -> String {
    let significant = significant.max(1);
    if x.is_zero() {
        return format!("{}e0", fixed_rational(&Rational::new(), significant - 1));
    }
    let q = exact(x);
    let negative = q < 0;
    let q = q.abs();
    let log10 = Float::with_val(64, x.abs_ref()).log10();
    let mut exp = log10.floor().to_f64() as i64;
    let low = pow10(significant - 1);
    let high = pow10(significant);
    let mantissa = loop {
        let shift = significant as i64 - 1 - exp;
        let scale = Rational::from(pow10(shift.unsigned_abs() as u32));
        let scaled = if shift >= 0 {
            Rational::from(&q * &scale)
        } else {
            Rational::from(&q / &scale)
        };
        let m = round(&scaled, mode);
        if m >= high {
            exp += 1;
        } else if m < low {
            exp -= 1;
        } else {
            break m;
        }
    };
    let digits = mantissa.to_string();
    let sign = if negative { "-" } else { "" };
    let (lead, rest) = digits.split_at(1);
    if rest.is_empty() {
        format!("{sign}{lead}e{exp}")
    } else {
        format!("{sign}{lead}.{rest}e{exp}")
    }
}
