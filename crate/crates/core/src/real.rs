//! Arbitrary-precision binary floating point, just enough for the explicit
//! bounds in [`crate::estimates`]: field operations, square root, natural
//! logarithm, exponential and π, each to about [`PRECISION_BITS`] bits.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Mantissa width kept after every operation (about 96 decimal digits).
pub const PRECISION_BITS: u64 = 320;

/// `mantissa · 2^exponent`, with the mantissa rounded to at most
/// [`PRECISION_BITS`] bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Real {
    mantissa: BigInt,
    exponent: i64,
}

fn shl(x: &BigInt, n: u64) -> BigInt {
    x << n as usize
}

/// Rounds half away from zero.
fn shr_round(x: &BigInt, n: u64) -> BigInt {
    if n == 0 {
        return x.clone();
    }
    let half = BigInt::one() << (n - 1) as usize;
    let mag = (x.abs() + half) >> n as usize;
    if x.is_negative() {
        -mag
    } else {
        mag
    }
}

impl Real {
    pub fn zero() -> Self {
        Self {
            mantissa: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    fn normalized(mantissa: BigInt, exponent: i64) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let bits = mantissa.bits();
        let (mantissa, exponent) = if bits > PRECISION_BITS {
            let shift = bits - PRECISION_BITS;
            (shr_round(&mantissa, shift), exponent + shift as i64)
        } else {
            (mantissa, exponent)
        };
        // Odd mantissas make the representation unique.
        let tz = mantissa.trailing_zeros().unwrap_or(0);
        Self {
            mantissa: mantissa >> tz as usize,
            exponent: exponent + tz as i64,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::normalized(BigInt::from(n), 0)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::normalized(n, 0)
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_int(n) / Self::from_int(d)
    }

    pub fn from_rational(r: &Rational) -> Self {
        Self::from_bigint(r.numer().clone()) / Self::from_bigint(r.denom().clone())
    }

    /// Exact conversion; `None` for NaN or infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Some(Self::normalized(BigInt::from(m) * sign, e))
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Self {
            mantissa: BigInt::one(),
            exponent: k,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Self {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// `floor(log2 |x|)`; meaningless for zero.
    fn magnitude(&self) -> i64 {
        self.exponent + self.mantissa.bits() as i64 - 1
    }

    /// Rounds to the nearest multiple of `2^k`.
    pub fn round_to_pow2(&self, k: i64) -> Self {
        if self.is_zero() || self.exponent >= k {
            return self.clone();
        }
        Self::normalized(shr_round(&self.mantissa, (k - self.exponent) as u64), k)
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Self {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent + k,
        }
    }

    fn add_ref(&self, other: &Real) -> Real {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let gap = self.magnitude() - other.magnitude();
        let limit = PRECISION_BITS as i64 + 4;
        if gap > limit {
            return self.clone();
        }
        if -gap > limit {
            return other.clone();
        }
        let e = self.exponent.min(other.exponent);
        let a = shl(&self.mantissa, (self.exponent - e) as u64);
        let b = shl(&other.mantissa, (other.exponent - e) as u64);
        Self::normalized(a + b, e)
    }

    fn mul_ref(&self, other: &Real) -> Real {
        Self::normalized(&self.mantissa * &other.mantissa, self.exponent + other.exponent)
    }

    fn div_ref(&self, other: &Real) -> Real {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let wanted = PRECISION_BITS as i64 + 2 + other.mantissa.bits() as i64 - self.mantissa.bits() as i64;
        let s = wanted.max(0) as u64;
        let q = shl(&self.mantissa, s) / &other.mantissa;
        Self::normalized(q, self.exponent - other.exponent - s as i64)
    }

    pub fn recip(&self) -> Real {
        Self::one().div_ref(self)
    }

    /// `None` for negative arguments.
    pub fn sqrt(&self) -> Option<Real> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let bits = self.mantissa.bits() as i64;
        let mut s = (2 * PRECISION_BITS as i64 + 2 - bits).max(0);
        if (self.exponent - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let root = shl(&self.mantissa, s as u64).sqrt();
        Some(Self::normalized(root, (self.exponent - s) / 2))
    }

    /// True when `term` no longer affects a sum of size `scale`.
    fn negligible(term: &Real, scale: &Real) -> bool {
        term.is_zero() || (!scale.is_zero() && term.magnitude() < scale.magnitude() - PRECISION_BITS as i64 - 8)
    }

    /// `atanh(t) = t + t³/3 + t⁵/5 + …` for `|t| ≤ 1/3`.
    fn atanh_small(t: &Real) -> Real {
        let t2 = t * t;
        let mut power = t.clone();
        let mut sum = t.clone();
        let mut n = 1i64;
        loop {
            power = &power * &t2;
            n += 2;
            let term = &power / &Real::from_int(n);
            if Self::negligible(&term, &sum) {
                return sum;
            }
            sum = &sum + &term;
        }
    }

    pub fn ln2() -> Real {
        Self::atanh_small(&Real::from_ratio(1, 3)).mul_pow2(1)
    }

    /// Natural logarithm; `None` unless the argument is positive.
    pub fn ln(&self) -> Option<Real> {
        if !self.is_positive() {
            return None;
        }
        // x = f · 2^k with f in [3/4, 3/2).
        let mut k = self.magnitude();
        let mut f = self.mul_pow2(-k);
        if f >= Real::from_ratio(3, 2) {
            f = f.mul_pow2(-1);
            k += 1;
        }
        let one = Real::one();
        let t = &(&f - &one) / &(&f + &one);
        let mut out = Self::atanh_small(&t).mul_pow2(1);
        if k != 0 {
            out = &out + &(&Self::ln2() * &Real::from_int(k));
        }
        Some(out)
    }

    pub fn exp(&self) -> Real {
        let ln2 = Self::ln2();
        let k = (self / &ln2).round_to_int();
        let k_i64 = k.to_i64().expect("exponential argument out of range");
        let r = self - &(&ln2 * &Real::from_bigint(k));
        const HALVINGS: i64 = 16;
        let r = r.mul_pow2(-HALVINGS);
        let mut term = Real::one();
        let mut sum = Real::one();
        let mut n = 0i64;
        loop {
            n += 1;
            term = &(&term * &r) / &Real::from_int(n);
            if Self::negligible(&term, &sum) {
                break;
            }
            sum = &sum + &term;
        }
        for _ in 0..HALVINGS {
            sum = &sum * &sum;
        }
        sum.mul_pow2(k_i64)
    }

    /// `atan(1/n)` for an integer `n ≥ 2`.
    fn atan_recip(n: i64) -> Real {
        let inv = Real::from_ratio(1, n);
        let inv2 = &inv * &inv;
        let mut power = inv.clone();
        let mut sum = inv;
        let mut k = 1i64;
        let mut sign_negative = true;
        loop {
            power = &power * &inv2;
            k += 2;
            let term = &power / &Real::from_int(k);
            if Self::negligible(&term, &sum) {
                return sum;
            }
            sum = if sign_negative { &sum - &term } else { &sum + &term };
            sign_negative = !sign_negative;
        }
    }

    /// `π = 16 atan(1/5) − 4 atan(1/239)`.
    pub fn pi() -> Real {
        &Self::atan_recip(5).mul_pow2(4) - &Self::atan_recip(239).mul_pow2(2)
    }

    pub fn round_to_int(&self) -> BigInt {
        if self.exponent >= 0 {
            return shl(&self.mantissa, self.exponent as u64);
        }
        shr_round(&self.mantissa, (-self.exponent) as u64)
    }

    pub fn to_rational(&self) -> Rational {
        if self.exponent >= 0 {
            Rational::from_integer(shl(&self.mantissa, self.exponent as u64))
        } else {
            Rational::new(self.mantissa.clone(), BigInt::one() << (-self.exponent) as usize)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        // Keep 64 leading bits, then scale by repeated halving/doubling.
        let shift = self.mantissa.bits() as i64 - 64;
        let (m, mut e) = if shift > 0 {
            (shr_round(&self.mantissa, shift as u64), self.exponent + shift)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        let mut x = m.to_f64().unwrap_or(0.0);
        while e > 0 && x.is_finite() {
            let step = e.min(1000);
            x *= pow2_f64(step);
            e -= step;
        }
        while e < 0 && x != 0.0 {
            let step = (-e).min(1000);
            x /= pow2_f64(step);
            e += step;
        }
        x
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        format_significant(&self.to_rational(), digits)
    }
}

fn pow2_f64(k: i64) -> f64 {
    let mut x = 1.0;
    for _ in 0..k {
        x *= 2.0;
    }
    x
}

/// Decimal form of an exact rational rounded to `digits` significant digits.
/// Positional for moderate exponents, scientific otherwise; trailing zeros
/// after the point are dropped.
pub fn format_significant(r: &Rational, digits: usize) -> String {
    let digits = digits.max(1);
    if r.is_zero() {
        return "0".into();
    }
    let negative = r.is_negative();
    let a = r.numer().abs();
    let b = r.denom().clone();
    let ten = BigInt::from(10);
    // Estimate p = floor(log10(a/b)), then correct.
    let mut p = ((a.bits() as f64 - b.bits() as f64) * core::f64::consts::LOG10_2) as i64;
    let pow = |k: i64| -> BigInt { num_traits::pow(ten.clone(), k as usize) };
    let ge_pow10 = |k: i64| -> bool {
        if k >= 0 {
            a >= &b * pow(k)
        } else {
            &a * pow(-k) >= b
        }
    };
    while !ge_pow10(p) {
        p -= 1;
    }
    while ge_pow10(p + 1) {
        p += 1;
    }
    let shift = digits as i64 - 1 - p;
    let (num, den) = if shift >= 0 {
        (&a * pow(shift), b.clone())
    } else {
        (a.clone(), &b * pow(-shift))
    };
    let (q, rem) = num.div_rem(&den);
    let mut scaled = if rem * 2 >= den { q + 1 } else { q };
    if scaled == pow(digits as i64) {
        scaled /= &ten;
        p += 1;
    }
    let s: Vec<u8> = scaled.to_str_radix(10).into_bytes();
    let s = String::from_utf8(s).expect("ascii digits");

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-6..21).contains(&p) {
        if p >= 0 {
            let int_len = p as usize + 1;
            if s.len() <= int_len {
                out.push_str(&s);
                for _ in s.len()..int_len {
                    out.push('0');
                }
            } else {
                out.push_str(&s[..int_len]);
                let frac = s[int_len..].trim_end_matches('0');
                if !frac.is_empty() {
                    out.push('.');
                    out.push_str(frac);
                }
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-p - 1) {
                out.push('0');
            }
            out.push_str(s.trim_end_matches('0'));
        }
    } else {
        out.push_str(&s[..1]);
        let frac = s[1..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        out.push('e');
        out.push_str(&alloc::format!("{p}"));
    }
    out
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.min(other.exponent);
        let a = shl(&self.mantissa, (self.exponent - e) as u64);
        let b = shl(&other.mantissa, (other.exponent - e) as u64);
        a.cmp(&b)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(30);
        f.write_str(&self.to_decimal(digits))
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        -self.clone()
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:expr) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                $f(self, rhs)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                $f(&self, &rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                $f(&self, rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                $f(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &Real, b: &Real| a.add_ref(b));
binop!(Sub, sub, |a: &Real, b: &Real| a.add_ref(&-b));
binop!(Mul, mul, |a: &Real, b: &Real| a.mul_ref(b));
binop!(Div, div, |a: &Real, b: &Real| a.div_ref(b));

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::from_int(n)
    }
}
