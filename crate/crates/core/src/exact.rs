//! Exact parsing of user-supplied numbers.
//!
//! Entries arrive as decimal strings (`"0.25"`, `"-3"`, `"1.5e-3"`) or
//! rationals (`"1/3"`, `"2.5/7"`) and are turned into exact [`Rational`]s so
//! that the only rounding happens once, when the caller picks a precision.

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Parses a decimal or `p/q` string into an exact rational.
pub fn parse_exact(text: &str) -> Result<Rational> {
    let s = text.trim();
    let invalid = || Error::InvalidNumber(text.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let num = parse_decimal(num.trim()).ok_or_else(invalid)?;
            let den = parse_decimal(den.trim()).ok_or_else(invalid)?;
            if den == 0 {
                return Err(invalid());
            }
            Ok(num / den)
        }
        None => parse_decimal(s).ok_or_else(invalid),
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (sign, body) = match s.as_bytes().first()? {
        b'-' => (-1, &s[1..]),
        b'+' => (1, &s[1..]),
        _ => (1, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], body[pos + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(Integer::from_str_radix(&digits, 10).ok()?);
    let scale = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    let power = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    Some(value * sign)
}

/// Rounds an exact rational to a float of the given precision.
pub fn to_float(value: &Rational, prec: u32) -> Float {
    Float::with_val(prec, value)
}
