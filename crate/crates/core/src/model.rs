//! Marked spheres and critical portraits of branched coverings.
//!
//! A [`CoveringSpec`] is the finite combinatorial shadow of a branched
//! self-covering `f` of degree `d`: every declared point carries its image and
//! the local degree of `f` there, so the declared set plays the role of the
//! forward-invariant marked set `P ⊇ P_f`. Sub-hyperbolic semi-rational maps,
//! whose postcritical set is infinite, are encoded through their finitely many
//! points outside the shielding disks plus a [`ShieldedStructure`]; points
//! inside the disks are never enumerated.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{AnnulusId, DiskId, Error, PointId, Rational, Result, Rule, ValidationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointRole {
    Postcritical,
    ExtraMarked,
    DiskCenter,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPoint {
    pub id: PointId,
    pub image: PointId,
    /// Local degree of the map at this point; `>= 2` marks a critical point.
    pub local_degree: u32,
    pub role: PointRole,
}

impl MarkedPoint {
    pub fn new(id: impl Into<PointId>, image: impl Into<PointId>, local_degree: u32) -> Self {
        Self {
            id: id.into(),
            image: image.into(),
            local_degree,
            role: PointRole::Postcritical,
        }
    }

    pub fn with_role(mut self, role: PointRole) -> Self {
        self.role = role;
        self
    }

    pub fn is_critical(&self) -> bool {
        self.local_degree >= 2
    }
}

/// Local model at a periodic point of the accumulation set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CycleKind {
    /// `f^p(z) = a + λ(z - a) + o(|z - a|)` with `0 < |λ| < 1`; stores `|λ|`.
    Attracting { modulus: Rational },
    /// `f^p(z) = a + α(z - a)^k + o(|z - a|^k)` with `k >= 2`.
    Superattracting { power: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AccumulationCycle {
    /// The cycle in dynamical order: `points[i + 1] = f(points[i])`.
    pub points: Vec<PointId>,
    pub kind: CycleKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShieldDisk {
    pub id: DiskId,
    pub center: PointId,
    /// Marked point on the disk boundary (`p_*`), kept so the reference set
    /// `E = P_1 ∪ {centers} ∪ {anchors}` is always constructible.
    pub anchor: PointId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShieldAnnulus {
    pub id: AnnulusId,
    pub attached_to: DiskId,
}

/// Shielding disks `D_i` around the accumulation cycles with their attached
/// rings `A_i`, and the disk-level map induced by `f(D̄_i ∪ A_i) ⊂ D_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ShieldedStructure {
    pub disks: Vec<ShieldDisk>,
    pub annuli: Vec<ShieldAnnulus>,
    pub image: BTreeMap<DiskId, DiskId>,
}

impl ShieldedStructure {
    pub fn disk(&self, id: &DiskId) -> Option<&ShieldDisk> {
        self.disks.iter().find(|d| &d.id == id)
    }

    pub fn disk_centered_at(&self, point: &PointId) -> Option<&ShieldDisk> {
        self.disks.iter().find(|d| &d.center == point)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringSpec {
    pub degree: u32,
    pub points: Vec<MarkedPoint>,
    pub cycles: Vec<AccumulationCycle>,
    pub shield: Option<ShieldedStructure>,
    /// Whether the full marked set `P` is finite (post-critically finite type).
    pub p_finite: bool,
    /// Set when the portrait lists every critical point, enabling the
    /// Riemann–Hurwitz check.
    pub complete: bool,
}

impl CoveringSpec {
    pub fn new(degree: u32, points: Vec<MarkedPoint>) -> Self {
        Self {
            degree,
            points,
            cycles: Vec::new(),
            shield: None,
            p_finite: true,
            complete: true,
        }
    }

    pub fn point(&self, id: &PointId) -> Option<&MarkedPoint> {
        self.points.iter().find(|p| &p.id == id)
    }

    pub fn contains(&self, id: &PointId) -> bool {
        self.point(id).is_some()
    }

    pub fn image_of(&self, id: &PointId) -> Option<&PointId> {
        self.point(id).map(|p| &p.image)
    }

    pub fn critical_points(&self) -> impl Iterator<Item = &MarkedPoint> {
        self.points.iter().filter(|p| p.is_critical())
    }

    /// `Σ (local_degree − 1)` over the declared points.
    pub fn ramification(&self) -> u64 {
        self.points
            .iter()
            .map(|p| u64::from(p.local_degree.saturating_sub(1)))
            .sum()
    }
}

/// Checks every structural invariant of a portrait and reports all violations.
pub fn validate_spec(spec: &CoveringSpec) -> ValidationReport {
    let mut report = ValidationReport::new();

    if spec.degree < 2 {
        report.push(Rule::Degree, format!("map degree {} < 2", spec.degree));
    }

    let mut seen = BTreeSet::new();
    for p in &spec.points {
        if !seen.insert(&p.id) {
            report.push(Rule::DuplicateId, format!("marked point {} declared twice", p.id));
        }
        if p.local_degree == 0 {
            report.push(Rule::Degree, format!("local degree of {} is 0", p.id));
        } else if p.local_degree > spec.degree {
            report.push(
                Rule::Degree,
                format!(
                    "local degree {} at {} exceeds map degree {}",
                    p.local_degree, p.id, spec.degree
                ),
            );
        }
        if !spec.contains(&p.image) {
            report.push(
                Rule::DanglingReference,
                format!("image of {} is undeclared point {}", p.id, p.image),
            );
        }
    }

    if spec.complete && spec.degree >= 1 {
        let sum = spec.ramification() as i64;
        let expected = 2 * i64::from(spec.degree) - 2;
        if sum != expected {
            report.push_residual(
                Rule::RiemannHurwitz,
                format!("Riemann–Hurwitz: {sum} ≠ {expected}"),
                sum - expected,
            );
        }
    }

    for (k, cycle) in spec.cycles.iter().enumerate() {
        validate_cycle(spec, k, cycle, &mut report);
    }

    if let Some(shield) = &spec.shield {
        validate_shield(spec, shield, &mut report);
    }

    report
}

fn validate_cycle(spec: &CoveringSpec, k: usize, cycle: &AccumulationCycle, report: &mut ValidationReport) {
    if cycle.points.is_empty() {
        report.push(Rule::Cycle, format!("cycle #{k} is empty"));
        return;
    }
    let distinct: BTreeSet<_> = cycle.points.iter().collect();
    if distinct.len() != cycle.points.len() {
        report.push(Rule::Cycle, format!("cycle #{k} repeats a point"));
    }
    for (i, p) in cycle.points.iter().enumerate() {
        let next = &cycle.points[(i + 1) % cycle.points.len()];
        match spec.image_of(p) {
            None => report.push(
                Rule::DanglingReference,
                format!("cycle #{k} lists undeclared point {p}"),
            ),
            Some(img) if img != next => {
                report.push(Rule::Cycle, format!("cycle #{k}: {p} maps to {img}, not to {next}"))
            }
            Some(_) => {}
        }
    }
    let product: u64 = cycle
        .points
        .iter()
        .filter_map(|p| spec.point(p))
        .map(|p| u64::from(p.local_degree))
        .product();
    match &cycle.kind {
        CycleKind::Attracting { modulus } => {
            if !(modulus.is_positive() && *modulus < Rational::one()) {
                report.push(
                    Rule::Cycle,
                    format!("cycle #{k}: attracting multiplier modulus {modulus} not in (0, 1)"),
                );
            }
            if product > 1 {
                report.push(
                    Rule::Cycle,
                    format!("cycle #{k} contains a critical point but is declared attracting"),
                );
            }
        }
        CycleKind::Superattracting { power } => {
            if *power < 2 {
                report.push(Rule::Cycle, format!("cycle #{k}: superattracting power {power} < 2"));
            } else if u64::from(*power) != product {
                report.push_residual(
                    Rule::Cycle,
                    format!("cycle #{k}: superattracting power {power} ≠ degree of the return map {product}"),
                    i64::from(*power) - product as i64,
                );
            }
        }
    }
}

fn validate_shield(spec: &CoveringSpec, shield: &ShieldedStructure, report: &mut ValidationReport) {
    let mut ids = BTreeSet::new();
    let mut centers = BTreeSet::new();
    for disk in &shield.disks {
        if !ids.insert(&disk.id) {
            report.push(Rule::DuplicateId, format!("shield disk {} declared twice", disk.id));
        }
        if !centers.insert(&disk.center) {
            report.push(
                Rule::Shield,
                format!("two shield disks share the center {}", disk.center),
            );
        }
        for (what, p) in [("center", &disk.center), ("anchor", &disk.anchor)] {
            if !spec.contains(p) {
                report.push(
                    Rule::DanglingReference,
                    format!("{what} {p} of shield disk {} is undeclared", disk.id),
                );
            }
        }
        if disk.center == disk.anchor {
            report.push(
                Rule::Shield,
                format!("shield disk {} anchors at its own center", disk.id),
            );
        }
        match shield.image.get(&disk.id) {
            None => report.push(Rule::Shield, format!("shield image undefined on disk {}", disk.id)),
            Some(target) if shield.disk(target).is_none() => report.push(
                Rule::DanglingReference,
                format!("shield disk {} maps into undeclared disk {target}", disk.id),
            ),
            Some(_) => {}
        }
    }
    for source in shield.image.keys() {
        if shield.disk(source).is_none() {
            report.push(
                Rule::DanglingReference,
                format!("shield image given for undeclared disk {source}"),
            );
        }
    }
    let mut annuli = BTreeSet::new();
    for annulus in &shield.annuli {
        if !annuli.insert(&annulus.id) {
            report.push(
                Rule::DuplicateId,
                format!("shield annulus {} declared twice", annulus.id),
            );
        }
        if shield.disk(&annulus.attached_to).is_none() {
            report.push(
                Rule::DanglingReference,
                format!(
                    "annulus {} attached to undeclared disk {}",
                    annulus.id, annulus.attached_to
                ),
            );
        }
    }
}

/// Forward orbits of the critical values inside the declared set.
///
/// A disk center reached by the orbit pulls in the center of the disk it is
/// carried into by the shield map.
pub fn postcritical_set(spec: &CoveringSpec) -> Result<BTreeSet<PointId>> {
    let mut pf = BTreeSet::new();
    let mut stack: Vec<(PointId, PointId)> = spec
        .critical_points()
        .map(|c| (c.id.clone(), c.image.clone()))
        .collect();

    while let Some((from, p)) = stack.pop() {
        let Some(point) = spec.point(&p) else {
            return Err(Error::PortraitIncomplete { from, to: p });
        };
        if !pf.insert(p.clone()) {
            continue;
        }
        stack.push((p.clone(), point.image.clone()));
        if let Some(shield) = &spec.shield {
            if let Some(disk) = shield.disk_centered_at(&p) {
                if let Some(next) = shield.image.get(&disk.id).and_then(|t| shield.disk(t)) {
                    stack.push((p.clone(), next.center.clone()));
                }
            }
        }
    }
    Ok(pf)
}

/// Value of the orbifold signature at a point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nu {
    Finite(BigUint),
    Infinite,
}

impl Nu {
    pub fn one() -> Self {
        Nu::Finite(BigUint::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Nu::Infinite)
    }

    /// `1 − 1/ν`, with `1 − 1/∞ = 1`.
    pub fn defect(&self) -> Rational {
        match self {
            Nu::Infinite => Rational::one(),
            Nu::Finite(n) => Rational::one() - Rational::new(1.into(), n.clone().into()),
        }
    }

    /// Whether `self` is a multiple of `factor` (everything divides into ∞).
    pub fn is_multiple_of(&self, factor: &Nu) -> bool {
        match (self, factor) {
            (Nu::Infinite, _) => true,
            (Nu::Finite(_), Nu::Infinite) => false,
            (Nu::Finite(a), Nu::Finite(b)) => !b.is_zero() && (a % b).is_zero(),
        }
    }
}

impl fmt::Display for Nu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nu::Finite(n) => write!(f, "{n}"),
            Nu::Infinite => f.write_str("∞"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldSignature {
    pub nu: BTreeMap<PointId, Nu>,
    pub chi: Rational,
}

impl OrbifoldSignature {
    pub fn from_nu(nu: BTreeMap<PointId, Nu>) -> Self {
        let chi = euler_characteristic_of(nu.values());
        Self { nu, chi }
    }

    pub fn get(&self, id: &PointId) -> Option<&Nu> {
        self.nu.get(id)
    }
}

/// Points lying on an image-cycle that contains a critical point.
fn critical_cycle_points(spec: &CoveringSpec) -> BTreeSet<PointId> {
    let mut out = BTreeSet::new();
    for start in &spec.points {
        // Walk forward; the start lies on a cycle iff it recurs within |P| steps.
        let mut current = &start.id;
        let mut on_cycle = false;
        let mut critical = start.is_critical();
        for _ in 0..spec.points.len() {
            let Some(next) = spec.image_of(current) else { break };
            if next == &start.id {
                on_cycle = true;
                break;
            }
            current = next;
            critical |= spec.point(current).is_some_and(MarkedPoint::is_critical);
        }
        if on_cycle && critical {
            out.insert(start.id.clone());
        }
    }
    out
}

/// Least solution of the divisibility closure `ν(f(y)) ≡ 0 mod deg_y f · ν(y)`.
///
/// `ν = ∞` on cycles through a critical point and on declared superattracting
/// cycles; for infinite marked sets (`p_finite == false`) every declared
/// accumulation cycle is infinite as well.
pub fn compute_signature(spec: &CoveringSpec) -> Result<OrbifoldSignature> {
    postcritical_set(spec)?;
    let mut infinite = critical_cycle_points(spec);
    for cycle in &spec.cycles {
        let forced = !spec.p_finite || matches!(cycle.kind, CycleKind::Superattracting { .. });
        if forced {
            infinite.extend(cycle.points.iter().cloned());
        }
    }

    let mut nu: BTreeMap<PointId, Nu> = spec
        .points
        .iter()
        .map(|p| {
            let v = if infinite.contains(&p.id) {
                Nu::Infinite
            } else {
                Nu::one()
            };
            (p.id.clone(), v)
        })
        .collect();

    loop {
        let mut changed = false;
        for y in &spec.points {
            let Some(source) = nu.get(&y.id).cloned() else { continue };
            let Some(target) = nu.get_mut(&y.image) else { continue };
            let updated = match (&source, &*target) {
                (_, Nu::Infinite) => continue,
                (Nu::Infinite, _) => Nu::Infinite,
                (Nu::Finite(s), Nu::Finite(t)) => Nu::Finite(t.lcm(&(s * BigUint::from(y.local_degree)))),
            };
            if updated != *target {
                *target = updated;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    Ok(OrbifoldSignature::from_nu(nu))
}

fn euler_characteristic_of<'a>(values: impl Iterator<Item = &'a Nu>) -> Rational {
    values.fold(Rational::from_integer(2.into()), |acc, v| acc - v.defect())
}

/// `χ = 2 − Σ (1 − 1/ν(x))`, exactly.
pub fn euler_characteristic(sig: &OrbifoldSignature) -> Rational {
    euler_characteristic_of(sig.nu.values())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbifoldType {
    Hyperbolic,
    Parabolic,
    /// `χ > 0`; never produced by a genuine branched covering whose marked set
    /// contains its postcritical set.
    Spherical,
}

impl OrbifoldType {
    pub fn is_anomalous(self) -> bool {
        self == OrbifoldType::Spherical
    }
}

impl fmt::Display for OrbifoldType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbifoldType::Hyperbolic => "hyperbolic",
            OrbifoldType::Parabolic => "parabolic",
            OrbifoldType::Spherical => "spherical (anomalous)",
        })
    }
}

pub fn orbifold_type(sig: &OrbifoldSignature) -> OrbifoldType {
    let chi = &sig.chi;
    if chi.is_negative() {
        OrbifoldType::Hyperbolic
    } else if chi.is_zero() {
        OrbifoldType::Parabolic
    } else {
        OrbifoldType::Spherical
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoveringType {
    /// Finite forward-invariant marked set containing `P_f`.
    PostcriticallyFinite,
    /// Infinite forward-invariant marked set with attracting/superattracting
    /// local models at the accumulation cycles.
    SubHyperbolicSemiRational,
}

impl fmt::Display for CoveringType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoveringType::PostcriticallyFinite => "PCF-type",
            CoveringType::SubHyperbolicSemiRational => "SHSR-type",
        })
    }
}

pub fn classify_type(spec: &CoveringSpec) -> Result<CoveringType> {
    for p in &spec.points {
        if !spec.contains(&p.image) {
            return Err(Error::PortraitIncomplete {
                from: p.id.clone(),
                to: p.image.clone(),
            });
        }
    }
    postcritical_set(spec)?;
    if spec.p_finite {
        return Ok(CoveringType::PostcriticallyFinite);
    }
    for (k, cycle) in spec.cycles.iter().enumerate() {
        let degree: u64 = cycle
            .points
            .iter()
            .filter_map(|p| spec.point(p))
            .map(|p| u64::from(p.local_degree))
            .product();
        match &cycle.kind {
            CycleKind::Attracting { modulus } => {
                if !(modulus.is_positive() && *modulus < Rational::one()) {
                    return Err(Error::NotSemiRational(format!(
                        "cycle #{k} has attracting multiplier modulus {modulus}, outside (0, 1)"
                    )));
                }
                if degree > 1 {
                    return Err(Error::NotSemiRational(format!(
                        "cycle #{k} has a critical return map but a linear local model"
                    )));
                }
            }
            CycleKind::Superattracting { power } => {
                if *power < 2 {
                    return Err(Error::NotSemiRational(format!(
                        "cycle #{k} has superattracting power {power} < 2"
                    )));
                }
            }
        }
    }
    Ok(CoveringType::SubHyperbolicSemiRational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn pt(id: &str, image: &str, deg: u32) -> MarkedPoint {
        MarkedPoint::new(id, image, deg)
    }

    fn power_map() -> CoveringSpec {
        CoveringSpec::new(2, vec![pt("0", "0", 2), pt("inf", "inf", 2)])
    }

    fn basilica() -> CoveringSpec {
        CoveringSpec::new(2, vec![pt("0", "-1", 2), pt("-1", "0", 1), pt("inf", "inf", 2)])
    }

    fn id(s: &str) -> PointId {
        PointId::from(s)
    }

    fn finite(n: u32) -> Nu {
        Nu::Finite(BigUint::from(n))
    }

    #[test]
    fn power_map_is_valid() {
        assert!(validate_spec(&power_map()).is_valid());
    }

    #[test]
    fn riemann_hurwitz_residual_is_reported() {
        let spec = CoveringSpec::new(2, vec![pt("c", "c", 2)]);
        let report = validate_spec(&spec);
        assert_eq!(report.violations.len(), 1);
        let v = &report.violations[0];
        assert_eq!(v.rule, Rule::RiemannHurwitz);
        assert_eq!(v.message, "Riemann–Hurwitz: 1 ≠ 2");
        assert_eq!(v.residual, Some(-1));
    }

    #[test]
    fn four_simple_critical_points_fit_degree_three() {
        let spec = CoveringSpec::new(
            3,
            vec![
                pt("c1", "c2", 2),
                pt("c2", "c3", 2),
                pt("c3", "c4", 2),
                pt("c4", "c1", 2),
            ],
        );
        assert!(validate_spec(&spec).is_valid());
    }

    #[test]
    fn incomplete_portrait_skips_riemann_hurwitz() {
        let mut spec = CoveringSpec::new(2, vec![pt("c", "c", 2)]);
        spec.complete = false;
        assert!(validate_spec(&spec).is_valid());
    }

    #[test]
    fn dangling_image_is_reported() {
        let spec = CoveringSpec::new(2, vec![pt("0", "0", 2), pt("inf", "ghost", 2)]);
        assert!(validate_spec(&spec).has(Rule::DanglingReference));
        assert_eq!(
            postcritical_set(&spec),
            Err(Error::PortraitIncomplete {
                from: id("inf"),
                to: id("ghost")
            })
        );
    }

    #[test]
    fn malformed_cycles_are_reported() {
        let mut spec = basilica();
        spec.cycles.push(AccumulationCycle {
            points: vec![id("0"), id("inf")],
            kind: CycleKind::Superattracting { power: 4 },
        });
        spec.cycles.push(AccumulationCycle {
            points: vec![id("inf")],
            kind: CycleKind::Attracting {
                modulus: Rational::one(),
            },
        });
        let report = validate_spec(&spec);
        let cycle_violations = report.violations.iter().filter(|v| v.rule == Rule::Cycle).count();
        // 0 does not map to inf; inf does not map to 0; modulus 1; critical yet attracting.
        assert_eq!(cycle_violations, 4, "{report}");
    }

    #[test]
    fn postcritical_sets() {
        let pf = postcritical_set(&power_map()).unwrap();
        assert_eq!(pf, [id("0"), id("inf")].into_iter().collect());
        let pf = postcritical_set(&basilica()).unwrap();
        assert_eq!(pf, [id("-1"), id("0"), id("inf")].into_iter().collect());
    }

    #[test]
    fn signatures() {
        let sig = compute_signature(&power_map()).unwrap();
        assert!(sig.nu.values().all(Nu::is_infinite));
        assert_eq!(sig.chi, Rational::zero());
        assert_eq!(orbifold_type(&sig), OrbifoldType::Parabolic);

        let sig = compute_signature(&basilica()).unwrap();
        assert!(sig.nu.values().all(Nu::is_infinite));
        assert_eq!(sig.chi, Rational::from_integer((-1).into()));
        assert_eq!(orbifold_type(&sig), OrbifoldType::Hyperbolic);
    }

    #[test]
    fn preperiodic_critical_orbit_signature() {
        // c -> v -> w -> w, deg_c = 2; a second critical point keeps RH intact.
        let spec = CoveringSpec::new(
            2,
            vec![pt("c", "v", 2), pt("v", "w", 1), pt("w", "w", 1), pt("inf", "inf", 2)],
        );
        let sig = compute_signature(&spec).unwrap();
        assert_eq!(sig.nu[&id("c")], finite(1));
        assert_eq!(sig.nu[&id("v")], finite(2));
        assert_eq!(sig.nu[&id("w")], finite(2));
        assert_eq!(sig.nu[&id("inf")], Nu::Infinite);
    }

    #[test]
    fn euler_characteristic_of_trivial_signature_is_two() {
        let sig = OrbifoldSignature::from_nu([(id("a"), Nu::one()), (id("b"), Nu::one())].into_iter().collect());
        assert_eq!(euler_characteristic(&sig), Rational::from_integer(2.into()));
    }

    #[test]
    fn orbifold_types_by_sign() {
        let mk = |chi: Rational| OrbifoldSignature {
            nu: BTreeMap::new(),
            chi,
        };
        assert_eq!(
            orbifold_type(&mk(Rational::from_integer((-1).into()))),
            OrbifoldType::Hyperbolic
        );
        assert_eq!(orbifold_type(&mk(Rational::zero())), OrbifoldType::Parabolic);
        let spherical = orbifold_type(&mk(Rational::new(1.into(), 2.into())));
        assert_eq!(spherical, OrbifoldType::Spherical);
        assert!(spherical.is_anomalous());
    }

    fn shhr_spec(modulus: Rational) -> CoveringSpec {
        let mut spec = CoveringSpec::new(
            2,
            vec![
                pt("c", "v", 2),
                pt("v", "a", 1),
                pt("a", "a", 1).with_role(PointRole::DiskCenter),
                pt("p", "a", 1).with_role(PointRole::ExtraMarked),
                pt("inf", "inf", 2),
            ],
        );
        spec.p_finite = false;
        spec.cycles.push(AccumulationCycle {
            points: vec![id("a")],
            kind: CycleKind::Attracting { modulus },
        });
        spec.shield = Some(ShieldedStructure {
            disks: vec![ShieldDisk {
                id: DiskId::from("D"),
                center: id("a"),
                anchor: id("p"),
            }],
            annuli: vec![ShieldAnnulus {
                id: AnnulusId::from("A"),
                attached_to: DiskId::from("D"),
            }],
            image: [(DiskId::from("D"), DiskId::from("D"))].into_iter().collect(),
        });
        spec
    }

    #[test]
    fn classification() {
        assert_eq!(classify_type(&basilica()), Ok(CoveringType::PostcriticallyFinite));
        let shsr = shhr_spec(Rational::new(1.into(), 2.into()));
        assert!(validate_spec(&shsr).is_valid(), "{}", validate_spec(&shsr));
        assert_eq!(classify_type(&shsr), Ok(CoveringType::SubHyperbolicSemiRational));
        let bad = shhr_spec(Rational::one());
        assert!(matches!(classify_type(&bad), Err(Error::NotSemiRational(_))));
    }

    #[test]
    fn shielded_signature_treats_attracting_cycle_as_infinite() {
        let sig = compute_signature(&shhr_spec(Rational::new(1.into(), 2.into()))).unwrap();
        assert_eq!(sig.nu[&id("a")], Nu::Infinite);
        assert_eq!(sig.nu[&id("v")], finite(2));
        assert_eq!(sig.nu[&id("p")], finite(1));
        // 2 - 1 (a) - 1 (inf) - 1/2 (v)
        assert_eq!(sig.chi, Rational::new((-1).into(), 2.into()));
    }

    #[test]
    fn shield_centers_are_pulled_into_the_postcritical_set() {
        let mut spec = shhr_spec(Rational::new(1.into(), 3.into()));
        // Second disk carried into the first by the shield map.
        spec.points.push(pt("b", "a", 1).with_role(PointRole::DiskCenter));
        spec.points.push(pt("q", "a", 1).with_role(PointRole::ExtraMarked));
        spec.points[1].image = id("b");
        let shield = spec.shield.as_mut().unwrap();
        shield.disks.push(ShieldDisk {
            id: DiskId::from("E"),
            center: id("b"),
            anchor: id("q"),
        });
        shield.image.insert(DiskId::from("E"), DiskId::from("D"));
        let pf = postcritical_set(&spec).unwrap();
        assert!(pf.contains(&id("b")) && pf.contains(&id("a")));
    }
}
