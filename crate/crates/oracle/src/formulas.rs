//! The explicit bounds, evaluated literally from their textbook form.

use crate::dec::Dec;

fn one() -> Dec {
    Dec::int(1)
}

pub fn collar(l: &Dec) -> (Dec, Dec) {
    let hi = &Dec::pi() / &(&Dec::int(2) * l);
    let lo = &hi - &one();
    (lo, hi)
}

pub fn zeta(z: &Dec) -> Dec {
    let s = (&one() - z).sqrt();
    &(&s - &one()) / &(&s + &one())
}

pub fn zeta_derivative_abs(x: &Dec) -> Dec {
    let s = (&one() - x).sqrt();
    let t = &one() + &s;
    &one() / &(&s * &(&t * &t))
}

pub fn r0(k1: &Dec) -> Dec {
    &one() / &(&Dec::int(2) * &(&Dec::int(2) * k1).exp())
}

pub fn samebig_c(k1: &Dec) -> Dec {
    let four = Dec::int(4);
    let num = &four - &(-&zeta(&r0(k1))).ln();
    let den = &four - &(-&zeta(&Dec::ratio(1, 2))).ln();
    (&num / &den).ln()
}

pub fn thin_cut(k: &Dec, k1: &Dec) -> Dec {
    let pi = Dec::pi();
    let c = samebig_c(k1);
    let two = Dec::int(2);
    let first = &(&pi * k) / &(&(&two * &pi) + &(&two * k));
    let second = &(&pi * &c) / &(&Dec::int(4) + &(&two * &c));
    first.min(second)
}

pub fn separation(abs_z: &Dec) -> Dec {
    &(abs_z + &one()).ln() / &(&Dec::int(2) * &Dec::pi())
}

pub fn poincare(x: &Dec) -> Dec {
    let z = zeta(x).abs();
    let ratio = &zeta_derivative_abs(x) / &z;
    &ratio / &(&Dec::int(4) - &z.ln())
}

pub fn capped_length(l_e: &Dec, c: &Dec) -> Dec {
    let slope = &(&Dec::int(2) * c) / &Dec::pi();
    l_e / &(&one() + &(&slope * l_e))
}

pub fn zj_floor(l_e: &Dec, epsilon: &Dec) -> Dec {
    l_e / &(&one() - epsilon)
}

/// The same bounds in `f64`, for quadrature and finite differences.
pub mod float {
    pub fn zeta(z: f64) -> f64 {
        let s = (1.0 - z).sqrt();
        (s - 1.0) / (s + 1.0)
    }

    pub fn poincare(x: f64) -> f64 {
        let s = (1.0 - x).sqrt();
        let dz = 1.0 / (s * (1.0 + s) * (1.0 + s));
        let z = zeta(x).abs();
        dz / z / (4.0 - z.ln())
    }
}

/// Evaluates a bound by its command-line name; outputs in the order the
/// library reports them.
pub fn evaluate(name: &str, args: &[Dec]) -> Option<Vec<Dec>> {
    let out = match (name, args) {
        ("collar", [l]) => {
            let (lo, hi) = collar(l);
            vec![lo, hi]
        }
        ("zeta", [x]) => vec![zeta(x)],
        ("r0", [k1]) => vec![r0(k1)],
        ("samebig-c", [k1]) => vec![samebig_c(k1)],
        ("thin-cut", [k, k1]) => vec![thin_cut(k, k1)],
        ("separation", [z]) => vec![separation(z)],
        ("poincare", [x]) => vec![poincare(x)],
        ("capped-length", [l, c]) => vec![capped_length(l, c)],
        ("zj-floor", [l, e]) => vec![zj_floor(l, e)],
        _ => return None,
    };
    Some(out)
}
