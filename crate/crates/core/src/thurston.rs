//! Thurston matrices of multicurves, certified comparison of their spectral
//! radius with 1, obstruction search and the length-decay diagnostic.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::curves::{is_full, is_stable, CurveClass, Multicurve, PullbackTable};
use crate::linalg::{charpoly, largest_root_cmp, largest_root_enclosure, Matrix};
use crate::{CurveId, Error, Rational, Result, Rule, ValidationReport};

/// Largest dimension handled through the exact characteristic polynomial.
pub const CHARPOLY_MAX_DIM: usize = 12;

/// Default bound on the universe size for [`search_obstructions`].
pub const DEFAULT_UNIVERSE_CAP: usize = 16;

const ENCLOSURE_BITS: u32 = 64;
const POWER_ITERATIONS: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThurstonMatrix {
    pub curve_order: Vec<CurveId>,
    pub entries: Matrix,
}

impl ThurstonMatrix {
    pub fn dim(&self) -> usize {
        self.curve_order.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        self.entries.get(i, j)
    }

    pub fn pow(&self, k: u32) -> ThurstonMatrix {
        let mut out = Matrix::identity(self.dim());
        for _ in 0..k {
            out = out.mul(&self.entries);
        }
        ThurstonMatrix {
            curve_order: self.curve_order.clone(),
            entries: out,
        }
    }
}

impl fmt::Display for ThurstonMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.entries.rows().enumerate() {
            write!(f, "{:>8} |", self.curve_order[i])?;
            for v in row {
                write!(f, " {v:>6}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Outcome of comparing `λ` with 1. `Ge` is used for `λ > 1`; a tie is `Eq`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Comparison {
    Lt,
    Eq,
    Ge,
}

impl Comparison {
    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Lt,
            Ordering::Equal => Comparison::Eq,
            Ordering::Greater => Comparison::Ge,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::Lt => "LT",
            Comparison::Eq => "EQ",
            Comparison::Ge => "GE",
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    CharpolyExact,
    PowerIterationBounded,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::CharpolyExact => "charpoly-exact",
            Method::PowerIterationBounded => "power-iteration-bounded",
        })
    }
}

/// The Perron root lies in `[lower, upper]`; `comparison` is exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCertificate {
    pub lower: Rational,
    pub upper: Rational,
    pub comparison: Comparison,
    pub method: Method,
}

impl SpectralCertificate {
    pub fn value(&self) -> Rational {
        (&self.lower + &self.upper) / Rational::from_integer(BigInt::from(2))
    }

    pub fn to_f64(&self) -> f64 {
        self.value().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_at_least_one(&self) -> bool {
        self.comparison != Comparison::Lt
    }
}

/// `A_Γ[i][j] = Σ 1/d` over the preimage components of `γ_j` in class `γ_i`.
pub fn thurston_matrix(table: &PullbackTable, gamma: &Multicurve) -> Result<ThurstonMatrix> {
    let n = gamma.len();
    let mut entries = Matrix::zeros(n);
    for (j, cj) in gamma.curves().iter().enumerate() {
        let comps = table
            .curve_entry(cj)
            .filter(|_| table.contains_curve(cj))
            .ok_or_else(|| Error::UnknownCurve(cj.clone()))?;
        for comp in comps {
            let CurveClass::Curve(ci) = &comp.class else { continue };
            if let Some(i) = gamma.position(ci) {
                let v = entries.get(i, j) + Rational::new(BigInt::one(), BigInt::from(comp.degree));
                entries.set(i, j, v);
            }
        }
    }
    Ok(ThurstonMatrix {
        curve_order: gamma.curves().to_vec(),
        entries,
    })
}

/// Certified Perron root of a non-negative matrix.
pub fn spectral_radius(a: &ThurstonMatrix) -> SpectralCertificate {
    if a.dim() > CHARPOLY_MAX_DIM {
        if let Some(cert) = power_iteration_certificate(&a.entries) {
            return cert;
        }
    }
    charpoly_certificate(&a.entries)
}

fn charpoly_certificate(m: &Matrix) -> SpectralCertificate {
    let p = charpoly(m);
    let one = Rational::one();
    // A non-negative matrix always has its spectral radius as a real eigenvalue.
    let ord = largest_root_cmp(&p, &one).unwrap_or(Ordering::Less);
    let (lower, upper) = if ord == Ordering::Equal {
        (one.clone(), one)
    } else {
        largest_root_enclosure(&p, ENCLOSURE_BITS).unwrap_or_else(|| (Rational::zero(), Rational::zero()))
    };
    let lower = lower.max(Rational::zero());
    let upper = upper.max(lower.clone());
    SpectralCertificate {
        lower,
        upper,
        comparison: Comparison::from_ordering(ord),
        method: Method::CharpolyExact,
    }
}

/// Rounds up to the dyadic grid `2^-ENCLOSURE_BITS`, staying positive.
fn round_up_dyadic(x: &Rational) -> Rational {
    let scale = BigInt::one() << ENCLOSURE_BITS;
    let num = (x * Rational::from_integer(scale.clone()))
        .ceil()
        .to_integer()
        .max(BigInt::one());
    Rational::new(num, scale)
}

/// Collatz–Wielandt bounds on `ρ(A + I)` along a rounded power iteration.
/// For any positive `x`, `min (Bx)_i/x_i ≤ ρ(B) ≤ max (Bx)_i/x_i`.
/// Returns `None` if the enclosure never excludes 1.
fn power_iteration_certificate(m: &Matrix) -> Option<SpectralCertificate> {
    let n = m.dim();
    let one = Rational::one();
    let mut shifted = m.clone();
    for i in 0..n {
        let v = shifted.get(i, i) + &one;
        shifted.set(i, i, v);
    }
    let mut x = vec![one.clone(); n];
    for _ in 0..POWER_ITERATIONS {
        let y = shifted.mul_vec(&x);
        let ratios: Vec<Rational> = y.iter().zip(&x).map(|(a, b)| a / b).collect();
        let lo = ratios.iter().min().cloned()? - &one;
        let hi = ratios.iter().max().cloned()? - &one;
        let comparison = if lo > one {
            Some(Comparison::Ge)
        } else if hi < one {
            Some(Comparison::Lt)
        } else {
            None
        };
        if let Some(comparison) = comparison {
            return Some(SpectralCertificate {
                lower: lo.max(Rational::zero()),
                upper: hi,
                comparison,
                method: Method::PowerIterationBounded,
            });
        }
        let top = y.iter().max().cloned()?;
        x = y.iter().map(|v| round_up_dyadic(&(v / &top))).collect();
    }
    None
}

/// Stable with `λ ≥ 1`.
pub fn is_obstruction(table: &PullbackTable, gamma: &Multicurve) -> bool {
    if !is_stable(table, gamma) {
        return false;
    }
    match thurston_matrix(table, gamma) {
        Ok(a) => spectral_radius(&a).is_at_least_one(),
        Err(_) => false,
    }
}

/// Strong connectivity of the digraph with an edge `i → j` for each non-zero entry.
pub fn is_irreducible(a: &ThurstonMatrix) -> bool {
    let n = a.dim();
    if n == 0 {
        return false;
    }
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for (v, visited) in seen.iter_mut().enumerate() {
                let e = if forward { a.entry(u, v) } else { a.entry(v, u) };
                if !e.is_zero() && !*visited {
                    *visited = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    if n == 1 {
        return !a.entry(0, 0).is_zero();
    }
    reach(true) && reach(false)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCandidate {
    pub curves: Multicurve,
    pub matrix: ThurstonMatrix,
    pub certificate: SpectralCertificate,
    pub stable: bool,
    pub full: bool,
    pub irreducible: bool,
}

impl ObstructionCandidate {
    /// Stable, full and irreducible.
    pub fn is_canonical_candidate(&self) -> bool {
        self.stable && self.full && self.irreducible
    }
}

/// Every stable multicurve in the universe with `λ ≥ 1`, ordered by size and
/// then by universe position of the members.
pub fn search_obstructions(table: &PullbackTable, cap: usize) -> Result<Vec<ObstructionCandidate>> {
    let n = table.universe.len();
    if n > cap || n >= 64 {
        return Err(Error::UniverseTooLarge { size: n, cap });
    }
    // successors[j]: universe indices reached by the preimage of curve j.
    let mut successors = vec![0u64; n];
    for (j, c) in table.universe.iter().enumerate() {
        let comps = table.curve_entry(c).ok_or_else(|| Error::UnknownCurve(c.clone()))?;
        for comp in comps {
            if let CurveClass::Curve(id) = &comp.class {
                match table.universe.iter().position(|u| u == id) {
                    Some(i) => successors[j] |= 1 << i,
                    None => return Err(Error::UnknownCurve(id.clone())),
                }
            }
        }
    }

    let mut found: Vec<(Vec<usize>, ObstructionCandidate)> = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if members.iter().any(|&j| successors[j] & !mask != 0) {
            continue;
        }
        let gamma = Multicurve::new(members.iter().map(|&i| table.universe[i].clone()).collect())?;
        let matrix = thurston_matrix(table, &gamma)?;
        let certificate = spectral_radius(&matrix);
        if !certificate.is_at_least_one() {
            continue;
        }
        let irreducible = is_irreducible(&matrix);
        let full = is_full(table, &gamma);
        found.push((
            members,
            ObstructionCandidate {
                curves: gamma,
                matrix,
                certificate,
                stable: true,
                full,
                irreducible,
            },
        ));
    }
    found.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    Ok(found.into_iter().map(|(_, c)| c).collect())
}

/// Hyperbolic lengths `l_{τ_n}(γ)` along a pullback sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct LengthTrace {
    pub curves: Vec<CurveId>,
    /// One vector per step, indexed like `curves`.
    pub samples: Vec<Vec<f64>>,
}

impl LengthTrace {
    pub fn validate(&self) -> Result<()> {
        for (n, s) in self.samples.iter().enumerate() {
            if s.len() != self.curves.len() {
                return Err(Error::Trace(format!(
                    "sample {n} has {} values for {} curves",
                    s.len(),
                    self.curves.len()
                )));
            }
            if let Some(v) = s.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(Error::Trace(format!("sample {n} has non-positive length {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayParams {
    pub floor: f64,
    pub window: usize,
    /// A curve decays when its per-step geometric ratio is below this.
    pub ratio_threshold: f64,
}

impl DecayParams {
    pub fn new(floor: f64) -> Self {
        Self {
            floor,
            window: 8,
            ratio_threshold: 0.95,
        }
    }

    pub fn with_window(mut self, window: usize) -> Self {
        self.window = window;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecayReport {
    pub gamma_c: BTreeSet<CurveId>,
    pub floor_violations: ValidationReport,
}

/// Splits the curves of a trace into those whose length decays to zero over
/// the trailing window and those that stay above `floor`; a curve doing
/// neither is reported.
pub fn length_decay_diagnostic(trace: &LengthTrace, params: &DecayParams) -> Result<DecayReport> {
    trace.validate()?;
    let w = params.window;
    if w < 2 {
        return Err(Error::Trace(format!("decay window {w} is shorter than 2")));
    }
    if trace.samples.len() < w {
        return Err(Error::Trace(format!(
            "{} samples, fewer than the decay window {w}",
            trace.samples.len()
        )));
    }
    let tail = &trace.samples[trace.samples.len() - w..];
    // (last/first)^(1/(w-1)) < r  ⇔  last < first · r^(w-1)
    let mut power = 1.0;
    for _ in 1..w {
        power *= params.ratio_threshold;
    }

    let mut gamma_c = BTreeSet::new();
    let mut floor_violations = ValidationReport::new();
    for (k, curve) in trace.curves.iter().enumerate() {
        let values: Vec<f64> = tail.iter().map(|s| s[k]).collect();
        let first = values[0];
        let last = values[w - 1];
        let decreasing = values.windows(2).all(|p| p[1] < p[0]);
        if decreasing && last < params.floor && last < first * power {
            gamma_c.insert(curve.clone());
        } else if let Some(v) = values.iter().find(|v| **v < params.floor) {
            floor_violations.push(
                Rule::LengthFloor,
                format!(
                    "curve {curve} neither decays nor stays above the floor {} (reaches {v})",
                    params.floor
                ),
            );
        }
    }
    Ok(DecayReport {
        gamma_c,
        floor_violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::PreimageComponent;
    use alloc::vec::Vec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn cc(s: &str) -> CurveClass {
        CurveClass::curve(s)
    }

    fn comp(class: CurveClass, degree: u64) -> PreimageComponent {
        PreimageComponent::new(class, degree)
    }

    fn table(d: u64, entries: Vec<(&str, Vec<PreimageComponent>)>) -> PullbackTable {
        let mut t = PullbackTable::new(
            d,
            entries.iter().map(|(c, _)| CurveId::from(*c)).collect(),
            BTreeSet::new(),
        );
        for (c, comps) in entries {
            t.insert(cc(c), comps);
        }
        t
    }

    fn mc(ids: &[&str]) -> Multicurve {
        Multicurve::new(ids.iter().map(|s| CurveId::from(*s)).collect()).unwrap()
    }

    fn tm(rows: Vec<Vec<Rational>>) -> ThurstonMatrix {
        let n = rows.len();
        ThurstonMatrix {
            curve_order: (0..n).map(|i| CurveId::from(format!("c{i}"))).collect(),
            entries: Matrix::from_rows(rows),
        }
    }

    fn levy() -> PullbackTable {
        table(2, vec![("g", vec![comp(cc("g"), 1), comp(CurveClass::Trivial, 1)])])
    }

    #[test]
    fn matrix_examples() {
        let a = thurston_matrix(&levy(), &mc(&["g"])).unwrap();
        assert_eq!(a.entry(0, 0), &q(1, 1));

        let t = table(4, vec![("g", vec![comp(cc("g"), 2), comp(cc("g"), 2)])]);
        assert_eq!(thurston_matrix(&t, &mc(&["g"])).unwrap().entry(0, 0), &q(1, 1));

        let t = table(
            4,
            vec![
                ("g1", vec![comp(cc("g2"), 2), comp(CurveClass::Trivial, 2)]),
                ("g2", vec![comp(cc("g1"), 4)]),
            ],
        );
        let mut t = t;
        t.insert(
            cc("g2"),
            vec![comp(cc("g1"), 4), comp(cc("g1"), 4), comp(CurveClass::Trivial, 4)],
        );
        t.map_degree = 12;
        let a = thurston_matrix(&t, &mc(&["g1", "g2"])).unwrap();
        assert_eq!(
            a.entries,
            Matrix::from_rows(vec![vec![q(0, 1), q(1, 2)], vec![q(1, 2), q(0, 1)]])
        );

        assert_eq!(
            thurston_matrix(&levy(), &mc(&["h"])),
            Err(Error::UnknownCurve(CurveId::from("h")))
        );
    }

    #[test]
    fn spectral_examples() {
        let c = spectral_radius(&tm(vec![vec![q(0, 1)]]));
        assert_eq!((c.comparison, c.value()), (Comparison::Lt, q(0, 1)));

        let c = spectral_radius(&tm(vec![vec![q(1, 2), q(1, 2)], vec![q(1, 2), q(1, 2)]]));
        assert_eq!((c.comparison, c.value()), (Comparison::Eq, q(1, 1)));
        assert_eq!(c.method, Method::CharpolyExact);

        let c = spectral_radius(&tm(vec![vec![q(1, 2)]]));
        assert_eq!((c.comparison, c.value()), (Comparison::Lt, q(1, 2)));

        let c = spectral_radius(&tm(vec![vec![q(0, 1), q(2, 1)], vec![q(2, 1), q(0, 1)]]));
        assert_eq!(c.comparison, Comparison::Ge);
        assert!(c.lower <= q(2, 1) && c.upper >= q(2, 1));
    }

    #[test]
    fn large_matrices_use_bounded_iteration() {
        let n = 14;
        let mut rows = vec![vec![q(0, 1); n]; n];
        for i in 0..n {
            rows[(i + 1) % n][i] = q(3, 4);
        }
        let c = spectral_radius(&tm(rows.clone()));
        assert_eq!(c.comparison, Comparison::Lt);

        for i in 0..n {
            rows[(i + 1) % n][i] = q(1, 1);
        }
        // A permutation matrix: λ = 1 exactly, only the exact path can certify.
        let c = spectral_radius(&tm(rows.clone()));
        assert_eq!((c.comparison, c.method), (Comparison::Eq, Method::CharpolyExact));

        for i in 0..n {
            rows[i][i] = q(1, 2);
            rows[(i + 1) % n][i] = q(3, 4);
        }
        let c = spectral_radius(&tm(rows));
        assert_eq!(
            (c.comparison, c.method),
            (Comparison::Ge, Method::PowerIterationBounded)
        );
        assert!(c.lower <= q(5, 4) && q(5, 4) <= c.upper);
    }

    #[test]
    fn obstruction_examples() {
        assert!(is_obstruction(&levy(), &mc(&["g"])));
        let t = table(2, vec![("g", vec![comp(cc("g"), 2)])]);
        assert!(!is_obstruction(&t, &mc(&["g"])));

        let t = table(
            2,
            vec![
                ("a", vec![comp(cc("b"), 1), comp(CurveClass::Trivial, 1)]),
                ("b", vec![comp(cc("b"), 1), comp(CurveClass::Trivial, 1)]),
            ],
        );
        assert!(!is_obstruction(&t, &mc(&["a"])));
        assert!(is_obstruction(&t, &mc(&["b"])));
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&tm(vec![
            vec![q(0, 1), q(1, 2)],
            vec![q(1, 2), q(0, 1)]
        ])));
        assert!(!is_irreducible(&tm(vec![
            vec![q(1, 1), q(0, 1)],
            vec![q(1, 1), q(1, 1)]
        ])));
        assert!(!is_irreducible(&tm(vec![vec![q(0, 1)]])));
        assert!(is_irreducible(&tm(vec![vec![q(1, 3)]])));
    }

    #[test]
    fn search_examples() {
        let found = search_obstructions(&levy(), DEFAULT_UNIVERSE_CAP).unwrap();
        assert_eq!(found.len(), 1);
        assert!(found[0].is_canonical_candidate());

        let t = table(
            2,
            vec![
                ("a", vec![comp(CurveClass::Trivial, 2)]),
                ("b", vec![comp(CurveClass::Trivial, 2)]),
            ],
        );
        assert!(search_obstructions(&t, DEFAULT_UNIVERSE_CAP).unwrap().is_empty());

        let t = table(
            2,
            vec![("g1", vec![comp(cc("g2"), 2)]), ("g2", vec![comp(cc("g1"), 2)])],
        );
        assert!(search_obstructions(&t, DEFAULT_UNIVERSE_CAP).unwrap().is_empty());

        assert_eq!(
            search_obstructions(&t, 1),
            Err(Error::UniverseTooLarge { size: 2, cap: 1 })
        );
    }

    fn trace(curves: &[&str], samples: Vec<Vec<f64>>) -> LengthTrace {
        LengthTrace {
            curves: curves.iter().map(|s| CurveId::from(*s)).collect(),
            samples,
        }
    }

    #[test]
    fn decay_examples() {
        let t = trace(
            &["a", "b"],
            vec![vec![1.0, 2.0], vec![0.5, 2.0], vec![0.25, 2.0], vec![0.125, 2.0]],
        );
        let r = length_decay_diagnostic(&t, &DecayParams::new(0.5).with_window(3)).unwrap();
        assert_eq!(r.gamma_c, [CurveId::from("a")].into_iter().collect());
        assert!(r.floor_violations.is_valid());

        let t = trace(&["a"], vec![vec![3.0]; 10]);
        let r = length_decay_diagnostic(&t, &DecayParams::new(1.0)).unwrap();
        assert!(r.gamma_c.is_empty() && r.floor_violations.is_valid());

        let t = trace(
            &["a"],
            (0..10).map(|n| vec![if n % 2 == 0 { 2.0 } else { 0.5 }]).collect(),
        );
        let r = length_decay_diagnostic(&t, &DecayParams::new(1.0)).unwrap();
        assert!(r.gamma_c.is_empty());
        assert!(r.floor_violations.has(Rule::LengthFloor));

        assert!(length_decay_diagnostic(&trace(&["a"], vec![vec![1.0]]), &DecayParams::new(1.0)).is_err());
        assert!(length_decay_diagnostic(&trace(&["a"], vec![vec![-1.0]; 9]), &DecayParams::new(1.0)).is_err());
    }
}
