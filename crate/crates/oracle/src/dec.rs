//! Decimal fixed point with `DIGITS` fractional digits.

use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Q;

pub const DIGITS: u32 = 90;

fn scale() -> BigInt {
    num_traits::pow(BigInt::from(10), DIGITS as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dec(BigInt);

impl Dec {
    pub fn int(n: i64) -> Dec {
        Dec(BigInt::from(n) * scale())
    }

    pub fn ratio(n: i64, d: i64) -> Dec {
        Dec(BigInt::from(n) * scale() / BigInt::from(d))
    }

    pub fn from_q(q: &Q) -> Dec {
        Dec(q.numer() * scale() / q.denom())
    }

    /// Parses a plain decimal literal such as `-0.125` or `3`.
    pub fn parse(s: &str) -> Dec {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        let mut digits = String::from(int);
        let mut frac = String::from(frac);
        frac.truncate(DIGITS as usize);
        while frac.len() < DIGITS as usize {
            frac.push('0');
        }
        digits.push_str(&frac);
        let v: BigInt = digits.parse().expect("decimal literal");
        Dec(if neg { -v } else { v })
    }

    pub fn to_q(&self) -> Q {
        Q::new(self.0.clone(), scale())
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_q().to_f64().unwrap()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Dec {
        Dec(self.0.abs())
    }

    pub fn eps() -> Dec {
        Dec(BigInt::one())
    }

    /// Newton iteration for `√x`, `x ≥ 0`.
    pub fn sqrt(&self) -> Dec {
        assert!(!self.is_negative());
        if self.0.is_zero() {
            return self.clone();
        }
        let target = &self.0 * scale();
        // Start above the root so the iteration decreases monotonically.
        let mut y = BigInt::one() << (target.bits() / 2 + 1) as usize;
        loop {
            let next = (&y + &target / &y) >> 1usize;
            if next >= y {
                return Dec(y);
            }
            y = next;
        }
    }

    /// `ln(1 + u) = u − u²/2 + u³/3 − …` after square-root reduction.
    pub fn ln(&self) -> Dec {
        assert!(self.0.is_positive(), "ln of non-positive");
        let one = Dec::int(1);
        let close = Dec::ratio(1, 1000);
        let mut x = self.clone();
        let mut k = 0u32;
        while (&x - &one).abs() > close {
            x = x.sqrt();
            k += 1;
        }
        let u = &x - &one;
        let mut power = u.clone();
        let mut sum = Dec::int(0);
        let mut n = 1i64;
        while !power.0.is_zero() {
            let term = &power / &Dec::int(n);
            sum = if n % 2 == 1 { &sum + &term } else { &sum - &term };
            power = &power * &u;
            n += 1;
        }
        Dec(sum.0 << k as usize)
    }

    /// Taylor series after halving.
    pub fn exp(&self) -> Dec {
        let mut k = 0u32;
        let mut x = self.clone();
        let small = Dec::ratio(1, 1000);
        while x.abs() > small {
            x = Dec(x.0 / 2);
            k += 1;
        }
        let mut term = Dec::int(1);
        let mut sum = Dec::int(1);
        let mut n = 1i64;
        while !term.0.is_zero() {
            term = &(&term * &x) / &Dec::int(n);
            sum = &sum + &term;
            n += 1;
        }
        for _ in 0..k {
            sum = &sum * &sum;
        }
        sum
    }

    /// Gauss–Legendre iteration.
    pub fn pi() -> Dec {
        let one = Dec::int(1);
        let mut a = one.clone();
        let mut b = (&one / &Dec::int(2)).sqrt();
        let mut t = Dec::ratio(1, 4);
        let mut p = one.clone();
        for _ in 0..12 {
            let an = Dec((&a.0 + &b.0) / 2);
            b = (&a * &b).sqrt();
            let d = &a - &an;
            t = &t - &(&p * &(&d * &d));
            p = Dec(p.0 * 2);
            a = an;
        }
        let s = &a + &b;
        &(&s * &s) / &Dec(t.0 * 4)
    }

    pub fn min(self, other: Dec) -> Dec {
        match self.cmp(&other) {
            Ordering::Greater => other,
            _ => self,
        }
    }
}

impl Add for &Dec {
    type Output = Dec;
    fn add(self, rhs: &Dec) -> Dec {
        Dec(&self.0 + &rhs.0)
    }
}

impl Sub for &Dec {
    type Output = Dec;
    fn sub(self, rhs: &Dec) -> Dec {
        Dec(&self.0 - &rhs.0)
    }
}

impl Mul for &Dec {
    type Output = Dec;
    fn mul(self, rhs: &Dec) -> Dec {
        Dec(&self.0 * &rhs.0 / scale())
    }
}

impl Div for &Dec {
    type Output = Dec;
    fn div(self, rhs: &Dec) -> Dec {
        Dec(&self.0 * scale() / &rhs.0)
    }
}

impl Neg for &Dec {
    type Output = Dec;
    fn neg(self) -> Dec {
        Dec(-&self.0)
    }
}

/// `|a − b| ≤ tol · |b|`, exactly.
pub fn rel_close(a: &Q, b: &Q, tol: &Q) -> bool {
    let diff = (a - b).abs();
    if b.is_zero() {
        return diff <= *tol;
    }
    diff <= tol * b.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_constants() {
        let pi = Dec::pi().to_q();
        let expected =
            Dec::parse("3.141592653589793238462643383279502884197169399375105820974944592307816406286").to_q();
        assert!(rel_close(
            &pi,
            &expected,
            &Q::new(1.into(), num_traits::pow(BigInt::from(10), 70))
        ));
        assert!((Dec::int(1).exp().to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!((Dec::int(2).ln().to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((Dec::int(2).sqrt().to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
    }
}
