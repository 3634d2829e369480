//! Exact parsing of numeric command-line arguments.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use spherecover_core::Rational;

/// Accepts integers, `p/q` fractions and decimals with an optional exponent
/// (`0.125`, `-3.5e-4`). Decimals are converted exactly.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a number (use a decimal such as 0.25 or a fraction such as 1/4)");
    if s.contains('/') {
        let r = Rational::from_str(s).map_err(|_| bad())?;
        return Ok(r);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = [int, frac].concat();
    let mut n = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if negative {
        n = -n;
    }
    let shift = exponent - frac.len() as i32;
    if shift.unsigned_abs() > 10_000 {
        return Err(format!("`{s}`: exponent out of range"));
    }
    let ten = BigInt::from(10);
    let scale: BigInt = Pow::pow(&ten, shift.unsigned_abs());
    Ok(if shift >= 0 {
        Rational::from_integer(n * scale)
    } else {
        Rational::new(n, scale)
    })
}

/// `start:stop:step`, stop inclusive, step positive.
pub fn parse_range(s: &str) -> Result<Vec<Rational>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(format!("range `{s}` must have the form start:stop:step"));
    };
    let (start, stop, step) = (parse_rational(start)?, parse_rational(stop)?, parse_rational(step)?);
    if step <= Rational::zero() {
        return Err(format!("range `{s}`: step must be positive"));
    }
    let mut out = Vec::new();
    let mut v = start;
    while v <= stop {
        if out.len() == 100_000 {
            return Err(format!("range `{s}` has more than 100000 points"));
        }
        out.push(v.clone());
        v += &step;
    }
    Ok(out)
}
