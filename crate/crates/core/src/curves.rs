//! Curve classes on the marked sphere and the action of `f⁻¹` on them.
//!
//! Isotopy classes are opaque ids: a [`PullbackTable`] is the ground truth for
//! how the covering lifts curves. Each key (a universe curve, or the
//! peripheral class around a marked point) lists the classes of the
//! components of its preimage together with the degree of `f` on each
//! component. The trivial class is implicit and lifts to itself with full
//! degree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{CurveId, Error, PointId, Result, Rule, ValidationReport};

/// Ordering is `Curve < Peripheral < Trivial`, then by id; components are
/// canonicalized with this order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CurveClass {
    Curve(CurveId),
    /// Boundary of a small disk around one marked point.
    Peripheral(PointId),
    /// Bounds a disk free of marked points.
    Trivial,
}

impl CurveClass {
    pub fn curve(id: impl Into<CurveId>) -> Self {
        CurveClass::Curve(id.into())
    }

    pub fn peripheral(id: impl Into<PointId>) -> Self {
        CurveClass::Peripheral(id.into())
    }

    pub fn as_curve(&self) -> Option<&CurveId> {
        match self {
            CurveClass::Curve(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveClass::Curve(c) => write!(f, "{c}"),
            CurveClass::Peripheral(p) => write!(f, "peripheral({p})"),
            CurveClass::Trivial => f.write_str("trivial"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PreimageComponent {
    pub class: CurveClass,
    pub degree: u64,
}

impl PreimageComponent {
    pub fn new(class: CurveClass, degree: u64) -> Self {
        Self { class, degree }
    }
}

/// Sorts components by `(class, degree)` so multisets compare with `==`.
pub fn canonicalize(components: &mut [PreimageComponent]) {
    components.sort();
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackTable {
    pub map_degree: u64,
    /// The curve universe, in declaration order.
    pub universe: Vec<CurveId>,
    /// Marked points whose peripheral classes may appear in the table.
    pub points: BTreeSet<PointId>,
    /// Preimage components per key. `Trivial` is never a key.
    pub entries: BTreeMap<CurveClass, Vec<PreimageComponent>>,
}

impl PullbackTable {
    pub fn new(map_degree: u64, universe: Vec<CurveId>, points: BTreeSet<PointId>) -> Self {
        Self {
            map_degree,
            universe,
            points,
            entries: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: CurveClass, components: Vec<PreimageComponent>) {
        self.entries.insert(key, components);
    }

    pub fn contains_curve(&self, id: &CurveId) -> bool {
        self.universe.contains(id)
    }

    /// Preimage components of `class`; the trivial class is synthesized.
    pub fn components(&self, class: &CurveClass) -> Option<Vec<PreimageComponent>> {
        match class {
            CurveClass::Trivial => Some(vec![PreimageComponent::new(CurveClass::Trivial, self.map_degree)]),
            other => self.entries.get(other).cloned(),
        }
    }

    pub fn curve_entry(&self, id: &CurveId) -> Option<&[PreimageComponent]> {
        self.entries.get(&CurveClass::Curve(id.clone())).map(Vec::as_slice)
    }

    /// Same table with every entry sorted.
    pub fn canonical(&self) -> Self {
        let mut out = self.clone();
        for comps in out.entries.values_mut() {
            canonicalize(comps);
        }
        out
    }

    fn class_declared(&self, class: &CurveClass) -> bool {
        match class {
            CurveClass::Curve(c) => self.contains_curve(c),
            CurveClass::Peripheral(p) => self.points.contains(p),
            CurveClass::Trivial => true,
        }
    }
}

/// A non-empty ordered set of universe curves.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multicurve {
    curves: Vec<CurveId>,
}

impl Multicurve {
    pub fn new(curves: Vec<CurveId>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::InvalidMulticurve("empty".into()));
        }
        let mut seen = BTreeSet::new();
        for c in &curves {
            if !seen.insert(c) {
                return Err(Error::InvalidMulticurve(format!("curve {c} listed twice")));
            }
        }
        Ok(Self { curves })
    }

    pub fn curves(&self) -> &[CurveId] {
        &self.curves
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn contains(&self, id: &CurveId) -> bool {
        self.curves.contains(id)
    }

    pub fn position(&self, id: &CurveId) -> Option<usize> {
        self.curves.iter().position(|c| c == id)
    }
}

impl fmt::Display for Multicurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.curves.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("}")
    }
}

/// Degree-sum and reference checks.
pub fn validate_table(table: &PullbackTable) -> ValidationReport {
    let mut report = ValidationReport::new();
    if table.map_degree < 2 {
        report.push(Rule::Degree, format!("map degree {} < 2", table.map_degree));
    }

    let mut seen = BTreeSet::new();
    for c in &table.universe {
        if !seen.insert(c) {
            report.push(Rule::DuplicateId, format!("curve {c} declared twice"));
        }
        if !table.entries.contains_key(&CurveClass::Curve(c.clone())) {
            report.push(Rule::DanglingReference, format!("no pullback entry for curve {c}"));
        }
    }

    for (key, comps) in &table.entries {
        match key {
            CurveClass::Trivial => {
                report.push(
                    Rule::DanglingReference,
                    "the trivial class has an implicit entry and may not be keyed",
                );
                continue;
            }
            other if !table.class_declared(other) => {
                report.push(
                    Rule::DanglingReference,
                    format!("entry keyed by undeclared class {other}"),
                );
            }
            _ => {}
        }
        let mut sum: u64 = 0;
        for comp in comps {
            if comp.degree == 0 {
                report.push(Rule::Degree, format!("component {} of {key} has degree 0", comp.class));
            }
            if !table.class_declared(&comp.class) {
                report.push(
                    Rule::DanglingReference,
                    format!("preimage of {key} references undeclared class {}", comp.class),
                );
            }
            sum += comp.degree;
        }
        if sum != table.map_degree {
            report.push_residual(
                Rule::DegreeSum,
                format!("{key}: degree sum {sum} ≠ {}", table.map_degree),
                sum as i64 - table.map_degree as i64,
            );
        }
    }
    report
}

/// All preimage components of the curves of `gamma`, concatenated in order.
pub fn pullback_classes(table: &PullbackTable, gamma: &Multicurve) -> Result<Vec<PreimageComponent>> {
    let mut out = Vec::new();
    for c in gamma.curves() {
        let entry = table
            .curve_entry(c)
            .filter(|_| table.contains_curve(c))
            .ok_or_else(|| Error::UnknownCurve(c.clone()))?;
        out.extend_from_slice(entry);
    }
    Ok(out)
}

/// Every non-peripheral preimage component of a curve of `gamma` is in `gamma`.
pub fn is_stable(table: &PullbackTable, gamma: &Multicurve) -> bool {
    gamma.curves().iter().all(|c| {
        table.curve_entry(c).is_some_and(|comps| {
            comps
                .iter()
                .all(|comp| comp.class.as_curve().is_none_or(|id| gamma.contains(id)))
        })
    })
}

/// Stable, and every curve of `gamma` occurs among the preimage classes.
pub fn is_full(table: &PullbackTable, gamma: &Multicurve) -> bool {
    if !is_stable(table, gamma) {
        return false;
    }
    let hit: BTreeSet<&CurveId> = gamma
        .curves()
        .iter()
        .filter_map(|c| table.curve_entry(c))
        .flatten()
        .filter_map(|comp| comp.class.as_curve())
        .collect();
    gamma.curves().iter().all(|c| hit.contains(c))
}

/// Pullback table of the `k`-th iterate, built at the class level.
///
/// A level-`(m+1)` component of a key is obtained by taking each level-1
/// component (class `i`, degree `e`) and replacing it with the level-`m`
/// components of `i`, degrees multiplied by `e`.
pub fn compose_table(table: &PullbackTable, k: u32) -> Result<PullbackTable> {
    assert!(k >= 1, "iterate exponent must be at least 1");
    let mut level = table.canonical();
    for _ in 1..k {
        let mut entries = BTreeMap::new();
        for (key, first) in &table.entries {
            let mut expanded = Vec::new();
            for comp in first {
                let deeper = match &comp.class {
                    CurveClass::Trivial => vec![PreimageComponent::new(CurveClass::Trivial, level.map_degree)],
                    CurveClass::Peripheral(p) => level
                        .entries
                        .get(&comp.class)
                        .cloned()
                        .ok_or_else(|| Error::PeripheralPullbackUndeclared(p.clone()))?,
                    CurveClass::Curve(c) => level
                        .entries
                        .get(&comp.class)
                        .cloned()
                        .ok_or_else(|| Error::UnknownCurve(c.clone()))?,
                };
                expanded.extend(
                    deeper
                        .into_iter()
                        .map(|d| PreimageComponent::new(d.class, d.degree * comp.degree)),
                );
            }
            canonicalize(&mut expanded);
            entries.insert(key.clone(), expanded);
        }
        level = PullbackTable {
            map_degree: level.map_degree * table.map_degree,
            universe: table.universe.clone(),
            points: table.points.clone(),
            entries,
        };
    }
    Ok(level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cid(s: &str) -> CurveId {
        CurveId::from(s)
    }

    fn comp(class: CurveClass, degree: u64) -> PreimageComponent {
        PreimageComponent::new(class, degree)
    }

    fn table(d: u64, universe: &[&str], points: &[&str]) -> PullbackTable {
        PullbackTable::new(
            d,
            universe.iter().map(|s| cid(s)).collect(),
            points.iter().map(|s| PointId::from(*s)).collect(),
        )
    }

    fn levy() -> PullbackTable {
        let mut t = table(2, &["g"], &[]);
        t.insert(
            CurveClass::curve("g"),
            vec![comp(CurveClass::curve("g"), 1), comp(CurveClass::Trivial, 1)],
        );
        t
    }

    fn mc(ids: &[&str]) -> Multicurve {
        Multicurve::new(ids.iter().map(|s| cid(s)).collect()).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_table(&levy()).is_valid());

        let mut short = table(2, &["g"], &[]);
        short.insert(CurveClass::curve("g"), vec![comp(CurveClass::curve("g"), 1)]);
        let report = validate_table(&short);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].message, "g: degree sum 1 ≠ 2");
        assert_eq!(report.violations[0].residual, Some(-1));

        let mut quartic = table(4, &["g"], &["p"]);
        quartic.insert(
            CurveClass::curve("g"),
            vec![
                comp(CurveClass::curve("g"), 2),
                comp(CurveClass::peripheral("p"), 1),
                comp(CurveClass::Trivial, 1),
            ],
        );
        assert!(validate_table(&quartic).is_valid());
    }

    #[test]
    fn dangling_references_are_reported() {
        let mut t = table(2, &["g"], &[]);
        t.insert(
            CurveClass::curve("g"),
            vec![comp(CurveClass::curve("h"), 1), comp(CurveClass::peripheral("q"), 1)],
        );
        let report = validate_table(&t);
        assert_eq!(
            report
                .violations
                .iter()
                .filter(|v| v.rule == Rule::DanglingReference)
                .count(),
            2
        );
    }

    #[test]
    fn pullback_lookup() {
        let t = levy();
        assert_eq!(
            pullback_classes(&t, &mc(&["g"])).unwrap(),
            vec![comp(CurveClass::curve("g"), 1), comp(CurveClass::Trivial, 1)]
        );
        assert_eq!(pullback_classes(&t, &mc(&["h"])), Err(Error::UnknownCurve(cid("h"))));

        let mut two = table(2, &["a", "b"], &[]);
        two.insert(CurveClass::curve("a"), vec![comp(CurveClass::curve("b"), 2)]);
        two.insert(CurveClass::curve("b"), vec![comp(CurveClass::Trivial, 2)]);
        assert_eq!(
            pullback_classes(&two, &mc(&["a", "b"])).unwrap(),
            vec![comp(CurveClass::curve("b"), 2), comp(CurveClass::Trivial, 2)]
        );
    }

    #[test]
    fn multicurve_rejects_empty_and_duplicates() {
        assert!(Multicurve::new(vec![]).is_err());
        assert!(Multicurve::new(vec![cid("a"), cid("a")]).is_err());
    }

    #[test]
    fn stability() {
        assert!(is_stable(&levy(), &mc(&["g"])));

        let mut t = table(2, &["g1", "g2"], &[]);
        t.insert(CurveClass::curve("g1"), vec![comp(CurveClass::curve("g2"), 2)]);
        t.insert(CurveClass::curve("g2"), vec![comp(CurveClass::Trivial, 2)]);
        assert!(!is_stable(&t, &mc(&["g1"])));
        assert!(is_stable(&t, &mc(&["g1", "g2"])));
    }

    #[test]
    fn fullness() {
        let mut t = table(2, &["g"], &[]);
        t.insert(CurveClass::curve("g"), vec![comp(CurveClass::curve("g"), 2)]);
        assert!(is_full(&t, &mc(&["g"])));

        let mut t = table(2, &["g1", "g2"], &[]);
        t.insert(
            CurveClass::curve("g1"),
            vec![comp(CurveClass::curve("g1"), 1), comp(CurveClass::Trivial, 1)],
        );
        t.insert(
            CurveClass::curve("g2"),
            vec![comp(CurveClass::curve("g1"), 1), comp(CurveClass::Trivial, 1)],
        );
        assert!(!is_full(&t, &mc(&["g1", "g2"])));

        let mut t = table(2, &["g"], &[]);
        t.insert(CurveClass::curve("g"), vec![comp(CurveClass::Trivial, 2)]);
        assert!(!is_full(&t, &mc(&["g"])));
    }

    #[test]
    fn compose_identity_and_square() {
        let t = levy();
        assert_eq!(compose_table(&t, 1).unwrap(), t.canonical());

        let sq = compose_table(&t, 2).unwrap();
        assert_eq!(sq.map_degree, 4);
        assert_eq!(
            sq.entries[&CurveClass::curve("g")],
            vec![
                comp(CurveClass::curve("g"), 1),
                comp(CurveClass::Trivial, 1),
                comp(CurveClass::Trivial, 2)
            ]
        );
        assert!(validate_table(&sq).is_valid());
    }

    #[test]
    fn compose_needs_peripheral_entries() {
        let mut t = table(2, &["g"], &["p"]);
        t.insert(
            CurveClass::curve("g"),
            vec![comp(CurveClass::curve("g"), 1), comp(CurveClass::peripheral("p"), 1)],
        );
        assert_eq!(compose_table(&t, 1).map(|_| ()), Ok(()));
        assert_eq!(
            compose_table(&t, 2),
            Err(Error::PeripheralPullbackUndeclared(PointId::from("p")))
        );
    }
}
