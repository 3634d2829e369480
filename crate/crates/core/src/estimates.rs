//! Explicit hyperbolic-geometry bounds, evaluated on the real slices where
//! they are used. Logarithms are natural.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::real::{Real, PRECISION_BITS};
use crate::{Error, Result};

/// Default constant in the capped-surface length comparison.
pub const DEFAULT_CAP_CONSTANT: i64 = 2;

fn domain(formula: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        formula,
        reason: reason.into(),
    }
}

fn require_positive(formula: &'static str, name: &str, x: &Real) -> Result<()> {
    if x.is_positive() {
        Ok(())
    } else {
        Err(domain(formula, format!("{name} must be positive")))
    }
}

fn require_unit_interval(formula: &'static str, name: &str, x: &Real) -> Result<()> {
    if x.is_positive() && *x < Real::one() {
        Ok(())
    } else {
        Err(domain(formula, format!("{name} must lie in (0, 1)")))
    }
}

/// `(π/(2l) − 1, π/(2l))` for the modulus of the collar around a geodesic of length `l`.
pub fn collar_modulus_bounds(l: &Real) -> Result<(Real, Real)> {
    require_positive("collar", "l", l)?;
    // On a grid of 2^(4−P) both hi and hi − 1 fit in P bits, so hi − lo is exactly 1.
    let hi = (Real::pi() / l.mul_pow2(1)).round_to_pow2(4 - PRECISION_BITS as i64);
    let lo = &hi - Real::one();
    Ok((lo, hi))
}

/// `ζ(z) = (√(1−z) − 1)/(√(1−z) + 1)`, written as `−z/(√(1−z) + 1)²` to
/// avoid cancellation near 0.
pub fn zeta(z: &Real) -> Result<Real> {
    require_unit_interval("zeta", "z", z)?;
    let s = (Real::one() - z).sqrt().expect("1 − z > 0") + Real::one();
    Ok(-(z / (&s * &s)))
}

/// `log(−ζ(r)) = log r − 2 log(1 + √(1−r))`.
fn log_neg_zeta(log_r: &Real, r: &Real) -> Real {
    let s = (Real::one() - r).sqrt().expect("r < 1");
    log_r - (Real::one() + s).ln().expect("positive").mul_pow2(1)
}

/// `r₀ = 1/(2e^{2K₁})`.
pub fn r0(k1: &Real) -> Result<Real> {
    require_positive("r0", "K1", k1)?;
    Ok(k1.mul_pow2(1).exp().mul_pow2(1).recip())
}

/// `C = log((4 − log(−ζ(r₀)))/(4 − log(−ζ(1/2))))`.
pub fn samebig_c(k1: &Real) -> Result<Real> {
    require_positive("C", "K1", k1)?;
    let r = r0(k1)?;
    // log r₀ = −2K₁ − log 2, exact even when r₀ itself is tiny.
    let log_r0 = -(k1.mul_pow2(1) + Real::ln2());
    let half = Real::from_ratio(1, 2);
    let log_half = -Real::ln2();
    let four = Real::from_int(4);
    let num = &four - log_neg_zeta(&log_r0, &r);
    let den = &four - log_neg_zeta(&log_half, &half);
    Ok((num / den).ln().expect("ratio of positives"))
}

/// `(πK/(2π+2K), πC/(4+2C))` with `C` from [`samebig_c`].
pub fn thin_cut_branches(k: &Real, k1: &Real) -> Result<(Real, Real)> {
    require_positive("thin-cut", "K", k)?;
    let pi = Real::pi();
    let c = samebig_c(k1)?;
    let first = (&pi * k) / (pi.mul_pow2(1) + k.mul_pow2(1));
    let second = (&pi * &c) / (Real::from_int(4) + c.mul_pow2(1));
    Ok((first, second))
}

/// `K̃ = min(πK/(2π+2K), πC/(4+2C))`.
pub fn thin_cut_lower_bound(k: &Real, k1: &Real) -> Result<Real> {
    let (first, second) = thin_cut_branches(k, k1)?;
    Ok(first.min(second))
}

/// `(1/2π) log(|z| + 1)`.
pub fn separation_modulus_bound(abs_z: &Real) -> Result<Real> {
    if abs_z.is_negative() {
        return Err(domain("separation", "|z| must be non-negative"));
    }
    Ok((abs_z + Real::one()).ln().expect("positive") / Real::pi().mul_pow2(1))
}

/// `|ζ′(x)| = 1/(√(1−x)(1 + √(1−x))²)`.
pub fn zeta_derivative_abs(x: &Real) -> Result<Real> {
    require_unit_interval("zeta-derivative", "x", x)?;
    let s = (Real::one() - x).sqrt().expect("1 − x > 0");
    let t = Real::one() + &s;
    Ok((s * &t * &t).recip())
}

/// `(|ζ′(x)|/|ζ(x)|) · 1/(4 − log|ζ(x)|)`, a lower bound for the Poincaré
/// density of the thrice-punctured sphere on `(0, 1)`.
pub fn poincare_density_lower(x: &Real) -> Result<Real> {
    require_unit_interval("poincare", "x", x)?;
    let z = zeta(x)?.abs();
    let dz = zeta_derivative_abs(x)?;
    let log_z = z.ln().expect("ζ ≠ 0 on (0, 1)");
    Ok(dz / z / (Real::from_int(4) - log_z))
}

/// `l_E/(1 + (2c/π) l_E)`.
pub fn capped_length_lower_bound(l_e: &Real, c: &Real) -> Result<Real> {
    require_positive("capped-length", "l_E", l_e)?;
    if *c <= Real::one() {
        return Err(domain("capped-length", "c must exceed 1"));
    }
    let slope = c.mul_pow2(1) / Real::pi();
    Ok(l_e / (Real::one() + slope * l_e))
}

/// `l_E/(1 − ε)`.
pub fn zj_comparison_floor(l_e: &Real, epsilon: &Real) -> Result<Real> {
    require_positive("zj-floor", "l_E", l_e)?;
    require_unit_interval("zj-floor", "epsilon", epsilon)?;
    Ok(l_e / (Real::one() - epsilon))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Collar,
    Zeta,
    R0,
    SamebigC,
    ThinCut,
    Separation,
    Poincare,
    CappedLength,
    ZjFloor,
}

impl Formula {
    pub const ALL: [Formula; 9] = [
        Formula::Collar,
        Formula::Zeta,
        Formula::R0,
        Formula::SamebigC,
        Formula::ThinCut,
        Formula::Separation,
        Formula::Poincare,
        Formula::CappedLength,
        Formula::ZjFloor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formula::Collar => "collar",
            Formula::Zeta => "zeta",
            Formula::R0 => "r0",
            Formula::SamebigC => "samebig-c",
            Formula::ThinCut => "thin-cut",
            Formula::Separation => "separation",
            Formula::Poincare => "poincare",
            Formula::CappedLength => "capped-length",
            Formula::ZjFloor => "zj-floor",
        }
    }

    /// Parameter names, in the order [`evaluate`] expects them.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Formula::Collar => &["l"],
            Formula::Zeta | Formula::Poincare => &["x"],
            Formula::R0 | Formula::SamebigC => &["K1"],
            Formula::ThinCut => &["K", "K1"],
            Formula::Separation => &["abs-z"],
            Formula::CappedLength => &["l-e", "c"],
            Formula::ZjFloor => &["l-e", "epsilon"],
        }
    }

    /// Defaults for optional parameters.
    pub fn default_param(self, name: &str) -> Option<Real> {
        match (self, name) {
            (Formula::CappedLength, "c") => Some(Real::from_int(DEFAULT_CAP_CONSTANT)),
            _ => None,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formula {
    type Err = String;
    fn from_str(s: &str) -> core::result::Result<Self, String> {
        Formula::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown formula {s}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub formula: Formula,
    pub inputs: Vec<(&'static str, Real)>,
    /// Named outputs; single-valued formulas use `"value"`.
    pub values: Vec<(&'static str, Real)>,
}

/// Evaluates `formula` at `args`, given in [`Formula::params`] order.
pub fn evaluate(formula: Formula, args: &[Real]) -> Result<BoundResult> {
    let names = formula.params();
    if args.len() != names.len() {
        return Err(domain(
            formula.name(),
            format!("expected {} parameter(s), got {}", names.len(), args.len()),
        ));
    }
    let values = match formula {
        Formula::Collar => {
            let (lo, hi) = collar_modulus_bounds(&args[0])?;
            vec![("lo", lo), ("hi", hi)]
        }
        Formula::Zeta => vec![("value", zeta(&args[0])?)],
        Formula::R0 => vec![("value", r0(&args[0])?)],
        Formula::SamebigC => vec![("value", samebig_c(&args[0])?)],
        Formula::ThinCut => vec![("value", thin_cut_lower_bound(&args[0], &args[1])?)],
        Formula::Separation => vec![("value", separation_modulus_bound(&args[0])?)],
        Formula::Poincare => vec![("value", poincare_density_lower(&args[0])?)],
        Formula::CappedLength => vec![("value", capped_length_lower_bound(&args[0], &args[1])?)],
        Formula::ZjFloor => vec![("value", zj_comparison_floor(&args[0], &args[1])?)],
    };
    Ok(BoundResult {
        formula,
        inputs: names.iter().copied().zip(args.iter().cloned()).collect(),
        values,
    })
}
