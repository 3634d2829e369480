//! Exact linear algebra over the rationals: square matrices, univariate
//! polynomials, characteristic polynomials and Sturm root counting.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    n: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds from rows; panics if the rows do not form a square.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend(row);
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Rational]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn trace(&self) -> Rational {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.n, x.len());
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|v| !v.is_negative())
    }
}

/// Dense polynomial with rational coefficients, lowest degree first.
/// The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd {
            let shift = rem.len() - 1 - dd;
            let q = rem.last().unwrap() / &lead;
            for (i, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + i] -= &q * c;
            }
            quot[shift] = q;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly) -> Poly {
        self.div_rem(divisor).1
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p')`: same roots, each simple.
    pub fn squarefree(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0.monic()
    }

    /// Upper bound on the modulus of every root: `1 + max |a_i / a_n|`.
    pub fn cauchy_bound(&self) -> Rational {
        let lead = self.leading();
        let mut m = Rational::zero();
        for c in &self.coeffs[..self.coeffs.len().saturating_sub(1)] {
            let r = (c / &lead).abs();
            if r > m {
                m = r;
            }
        }
        m + Rational::one()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => f.write_str("t")?,
                (1, false) => write!(f, "{a}·t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{a}·t^{i}")?,
            }
        }
        Ok(())
    }
}

/// `det(tI − A)` by the Faddeev–LeVerrier recurrence, exact.
pub fn charpoly(a: &Matrix) -> Poly {
    let n = a.dim();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut m = Matrix::zeros(n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = a.mul(&m);
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        m = next;
        let tr = a.mul(&m).trace();
        coeffs[n - k] = -tr / Rational::from_integer(BigInt::from(k));
    }
    Poly::new(coeffs)
}

/// Sturm sequence of a squarefree polynomial.
#[derive(Clone, Debug)]
pub struct SturmChain {
    chain: Vec<Poly>,
}

impl SturmChain {
    pub fn new(p: &Poly) -> Self {
        let p = p.squarefree();
        let mut chain = vec![p.clone()];
        let mut prev = p;
        let mut cur = prev.derivative();
        while !cur.is_zero() {
            let r = prev.rem(&cur);
            chain.push(cur.clone());
            prev = cur;
            cur = r.scale(&-Rational::one());
        }
        Self { chain }
    }

    pub fn base(&self) -> &Poly {
        &self.chain[0]
    }

    fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
        let mut last = Ordering::Equal;
        let mut count = 0;
        for s in signs {
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    fn variations_at(&self, x: &Rational) -> usize {
        Self::variations(self.chain.iter().map(|p| p.eval(x).cmp(&Rational::zero())))
    }

    fn variations_at_infinity(&self) -> usize {
        Self::variations(self.chain.iter().map(|p| p.leading().cmp(&Rational::zero())))
    }

    /// Number of distinct real roots in `(x, ∞)`.
    pub fn roots_above(&self, x: &Rational) -> usize {
        let v = if self.base().eval(x).is_zero() {
            // Count at x + ε: there the base polynomial has the sign of p'(x).
            Self::variations(
                core::iter::once(self.chain[1].eval(x).cmp(&Rational::zero()))
                    .chain(self.chain.iter().skip(1).map(|p| p.eval(x).cmp(&Rational::zero()))),
            )
        } else {
            self.variations_at(x)
        };
        v - self.variations_at_infinity()
    }
}

/// Where the largest real root of a polynomial sits relative to `x`.
///
/// Returns `None` when the polynomial has no real root.
pub fn largest_root_cmp(p: &Poly, x: &Rational) -> Option<Ordering> {
    let chain = SturmChain::new(p);
    if chain.roots_above(x) > 0 {
        return Some(Ordering::Greater);
    }
    if chain.base().eval(x).is_zero() {
        return Some(Ordering::Equal);
    }
    let below = -chain.base().cauchy_bound() - Rational::one();
    if chain.roots_above(&below) > 0 {
        Some(Ordering::Less)
    } else {
        None
    }
}

/// Rational interval `[lo, hi]` of width at most `2^-bits` that contains the
/// largest real root. Exact roots on the dyadic grid give `lo == hi`.
pub fn largest_root_enclosure(p: &Poly, bits: u32) -> Option<(Rational, Rational)> {
    let chain = SturmChain::new(p);
    // A power-of-two box keeps every midpoint dyadic.
    let bound = chain.base().cauchy_bound();
    let mut hi = Rational::one();
    while hi < bound {
        hi *= Rational::from_integer(BigInt::from(2));
    }
    let mut lo = -hi.clone();
    if chain.roots_above(&lo) == 0 {
        return None;
    }
    let two = Rational::from_integer(BigInt::from(2));
    let width = Rational::new(BigInt::one(), BigInt::one() << bits);
    while &hi - &lo > width {
        let mid = (&lo + &hi) / &two;
        if chain.base().eval(&mid).is_zero() && chain.roots_above(&mid) == 0 {
            return Some((mid.clone(), mid));
        }
        if chain.roots_above(&mid) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}
