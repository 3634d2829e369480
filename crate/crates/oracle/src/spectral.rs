//! Brute-force comparison of the Perron root of a non-negative rational
//! matrix with 1, by two unrelated routes.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Q;

pub type Mat = Vec<Vec<Q>>;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Determinant by fraction Gaussian elimination with row swaps.
pub fn det(m: &Mat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Q::zero();
        };
        if p != col {
            a.swap(p, col);
            d = -d;
        }
        let pivot = a[col][col].clone();
        d *= &pivot;
        for r in col + 1..n {
            let f = &a[r][col] / &pivot;
            if f.is_zero() {
                continue;
            }
            let (top, bottom) = a.split_at_mut(r);
            for (dst, src) in bottom[0][col..n].iter_mut().zip(&top[col][col..n]) {
                *dst -= &f * src;
            }
        }
    }
    d
}

/// Coefficients (lowest first) of `det(tI − A)` by Lagrange interpolation
/// through `t = 0, 1, …, n`.
pub fn charpoly(a: &Mat) -> Vec<Q> {
    let n = a.len();
    let nodes: Vec<Q> = (0..=n as i64).map(q).collect();
    let values: Vec<Q> = nodes
        .iter()
        .map(|t| {
            let m: Mat = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { t - &a[i][j] } else { -a[i][j].clone() })
                        .collect()
                })
                .collect();
            det(&m)
        })
        .collect();
    let mut out = vec![Q::zero(); n + 1];
    for (k, yk) in values.iter().enumerate() {
        // basis polynomial Π_{j≠k} (t − x_j)/(x_k − x_j)
        let mut basis = vec![Q::one()];
        let mut denom = Q::one();
        for (j, xj) in nodes.iter().enumerate() {
            if j == k {
                continue;
            }
            let mut next = vec![Q::zero(); basis.len() + 1];
            for (i, c) in basis.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * xj;
            }
            basis = next;
            denom *= &nodes[k] - xj;
        }
        let scale = yk / &denom;
        for (i, c) in basis.iter().enumerate() {
            out[i] += c * &scale;
        }
    }
    trim(out)
}

fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

pub fn eval(p: &[Q], x: &Q) -> Q {
    p.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

fn derivative(p: &[Q]) -> Vec<Q> {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
}

fn rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let lead = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / &lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

fn quotient(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = a.to_vec();
    let lead = b.last().unwrap().clone();
    let mut out = vec![Q::zero(); a.len().saturating_sub(b.len()) + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let f = r.last().unwrap() / &lead;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &f * c;
        }
        out[shift] = f;
        r.pop();
    }
    trim(out)
}

fn squarefree(p: &[Q]) -> Vec<Q> {
    let mut a = p.to_vec();
    let mut b = derivative(p);
    if b.is_empty() {
        return a;
    }
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    quotient(p, &a)
}

fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sign changes of `(1+y)^n p((a + b y)/(1 + y))`, which bounds the number
/// of roots in `(a, b)` and has the same parity.
fn descartes(p: &[Q], a: &Q, b: &Q) -> usize {
    let n = p.len() - 1;
    let mut total = vec![Q::zero(); n + 1];
    for (i, c) in p.iter().enumerate() {
        let mut term = vec![c.clone()];
        for _ in 0..i {
            term = poly_mul(&term, &[a.clone(), b.clone()]);
        }
        for _ in i..n {
            term = poly_mul(&term, &[Q::one(), Q::one()]);
        }
        for (k, t) in term.into_iter().enumerate() {
            total[k] += t;
        }
    }
    let signs: Vec<bool> = total.iter().filter(|c| !c.is_zero()).map(|c| c.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct roots of a squarefree `p` in the open interval `(a, b)`.
fn roots_between(p: &[Q], a: &Q, b: &Q, depth: u32) -> usize {
    match descartes(p, a, b) {
        0 => 0,
        1 => 1,
        _ => {
            assert!(depth < 200, "root isolation did not converge");
            let m = (a + b) / q(2);
            let on = usize::from(eval(p, &m).is_zero());
            roots_between(p, a, &m, depth + 1) + on + roots_between(p, &m, b, depth + 1)
        }
    }
}

/// Perron root vs 1 from the characteristic polynomial.
pub fn compare_by_charpoly(a: &Mat) -> Ordering {
    let p = squarefree(&charpoly(a));
    let lead = p.last().unwrap().clone();
    let bound = p[..p.len() - 1]
        .iter()
        .map(|c| (c / &lead).abs())
        .fold(Q::zero(), |m, v| if v > m { v } else { m })
        + Q::one()
        + Q::one();
    if p.len() > 1 && roots_between(&p, &Q::one(), &bound, 0) > 0 {
        Ordering::Greater
    } else if eval(&p, &Q::one()).is_zero() {
        Ordering::Equal
    } else {
        Ordering::Less
    }
}

/// Perron root vs 1 from M-matrix sign conditions on `I − A`: `ρ < 1` iff
/// every leading principal minor is positive, `ρ ≤ 1` iff every principal
/// minor is non-negative.
pub fn compare_by_minors(a: &Mat) -> Ordering {
    let n = a.len();
    let b: Mat = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() - &a[i][j] } else { -a[i][j].clone() })
                .collect()
        })
        .collect();
    let minor = |idx: &[usize]| -> Q {
        let m: Mat = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| b[i][j].clone()).collect())
            .collect();
        det(&m)
    };
    if (1..=n).all(|k| minor(&(0..k).collect::<Vec<_>>()).is_positive()) {
        return Ordering::Less;
    }
    let all_nonneg = (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        !minor(&idx).is_negative()
    });
    if all_nonneg {
        Ordering::Equal
    } else {
        Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> Mat {
        rows.iter()
            .map(|r| r.iter().map(|&(n, d)| Q::new(n.into(), d.into())).collect())
            .collect()
    }

    #[test]
    fn examples() {
        let cases = [
            (m(&[&[(0, 1)]]), Ordering::Less),
            (m(&[&[(1, 2), (1, 2)], &[(1, 2), (1, 2)]]), Ordering::Equal),
            (m(&[&[(0, 1), (2, 1)], &[(2, 1), (0, 1)]]), Ordering::Greater),
            (m(&[&[(1, 1), (0, 1)], &[(1, 1), (1, 1)]]), Ordering::Equal),
            (m(&[&[(1, 1), (1, 1)], &[(0, 1), (1, 2)]]), Ordering::Equal),
        ];
        for (a, want) in cases {
            assert_eq!(compare_by_charpoly(&a), want);
            assert_eq!(compare_by_minors(&a), want);
        }
        let p = charpoly(&m(&[&[(1, 1), (2, 1)], &[(3, 1), (4, 1)]]));
        assert_eq!(p, vec![q(-2), q(-5), q(1)]);
    }
}
