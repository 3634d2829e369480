//! Capping a periodic thick piece with disks to get a new covering `f̃`.
//!
//! Let `P` be a thick piece of period `k` and `D = deg(f^k : P^k → P)`. Each
//! boundary curve `γ_i` of `P` gets a disk `D(γ_i)` with a new marked point
//! `z_i`; each peripheral boundary curve `β_j` of `P^k` gets a disk mapped
//! onto the disk of its target. Only local degrees and point dynamics are
//! tracked, never the gluing maps themselves.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::curves::{canonicalize, compose_table, CurveClass, PreimageComponent, PullbackTable};
use crate::model::{
    classify_type, compute_signature, orbifold_type, validate_spec, AccumulationCycle, CoveringSpec, CoveringType,
    CycleKind, MarkedPoint, OrbifoldSignature, OrbifoldType, PointRole,
};
use crate::thurston::{search_obstructions, ObstructionCandidate};
use crate::{BoundaryId, CurveId, Error, PieceId, PointId, Rational, Result, Rule, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaCurve {
    pub curve: CurveId,
    /// Index into the piece's γ list of `f^k(γ_i)`.
    pub image: usize,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaCurve {
    pub id: BoundaryId,
    /// Index of the γ it covers under `f^k`.
    pub target: usize,
    pub degree: u32,
    /// The marked point inside the disk bounded by `β`, if any.
    pub z_star: Option<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicPieceData {
    pub piece: PieceId,
    pub period: u32,
    /// Degree of `f^k` on the level-`k` piece.
    pub degree: u32,
    pub gamma: Vec<GammaCurve>,
    pub beta: Vec<BetaCurve>,
    /// `f^k` restricted to the marked points of the piece.
    pub interior: CoveringSpec,
    /// Universe curves lying inside the piece.
    pub interior_curves: Vec<CurveId>,
    /// For each interior curve (and optionally each interior peripheral
    /// class), the sub-multiset of its level-`k` preimage components that lie
    /// in the level-`k` piece.
    pub containment: BTreeMap<CurveClass, Vec<PreimageComponent>>,
}

impl PeriodicPieceData {
    /// Id of the new marked point in `D(γ_i)`.
    pub fn z_id(&self, i: usize) -> PointId {
        PointId::new(format!("z:{}", self.gamma[i].curve))
    }

    /// Id of the critical center of a `β` disk without a marked point.
    pub fn center_id(&self, j: usize) -> PointId {
        PointId::new(format!("c:{}", self.beta[j].id))
    }

    fn z_stars(&self) -> BTreeSet<&PointId> {
        self.beta.iter().filter_map(|b| b.z_star.as_ref()).collect()
    }
}

/// Degree bookkeeping and Riemann–Hurwitz for the capped covering.
pub fn validate_extension(data: &PeriodicPieceData) -> ValidationReport {
    let mut report = ValidationReport::new();
    let d = i64::from(data.degree);
    if data.degree < 2 {
        report.push(Rule::Degree, format!("degree 1 piece: degree {} < 2", data.degree));
    }
    if data.period == 0 {
        report.push(Rule::Degree, "period must be at least 1");
    }
    if data.gamma.is_empty() {
        report.push(Rule::Index, "piece has no boundary curves");
    }
    if data.interior.degree != data.degree {
        report.push(
            Rule::Degree,
            format!(
                "interior portrait has degree {} but the piece degree is {}",
                data.interior.degree, data.degree
            ),
        );
    }

    let p = data.gamma.len();
    let mut sums = vec![0i64; p];
    for g in &data.gamma {
        if g.degree == 0 {
            report.push(Rule::Degree, format!("boundary curve {} has degree 0", g.curve));
        }
        match sums.get_mut(g.image) {
            Some(s) => *s += i64::from(g.degree),
            None => report.push(
                Rule::Index,
                format!("boundary curve {} maps to index {} of {p}", g.curve, g.image),
            ),
        }
    }
    for b in &data.beta {
        if b.degree == 0 {
            report.push(Rule::Degree, format!("peripheral curve {} has degree 0", b.id));
        }
        match sums.get_mut(b.target) {
            Some(s) => *s += i64::from(b.degree),
            None => report.push(
                Rule::Index,
                format!("peripheral curve {} targets index {} of {p}", b.id, b.target),
            ),
        }
    }
    for (m, s) in sums.iter().enumerate() {
        if *s != d {
            report.push_residual(
                Rule::TargetDegree,
                format!("disk of {}: Σ d_β + Σ d_γ = {s} ≠ {d}", data.gamma[m].curve),
                s - d,
            );
        }
    }

    let stars = data.z_stars();
    if stars.len() != data.beta.iter().filter(|b| b.z_star.is_some()).count() {
        report.push(Rule::DuplicateId, "a marked point is claimed by two peripheral disks");
    }
    for b in &data.beta {
        let Some(z) = &b.z_star else { continue };
        match data.interior.point(z) {
            None => report.push(
                Rule::DanglingReference,
                format!("peripheral disk point {z} is not in the interior portrait"),
            ),
            Some(x) if x.local_degree != b.degree => report.push_residual(
                Rule::Degree,
                format!(
                    "{z} is the center of the disk of {} and needs local degree {}",
                    b.id, b.degree
                ),
                i64::from(x.local_degree) - i64::from(b.degree),
            ),
            Some(_) => {}
        }
    }
    for x in &data.interior.points {
        if x.local_degree == 0 || x.local_degree > data.degree {
            report.push(
                Rule::Degree,
                format!(
                    "local degree {} at {} is outside 1..={}",
                    x.local_degree, x.id, data.degree
                ),
            );
        }
        if !stars.contains(&x.id) && !data.interior.contains(&x.image) {
            report.push(
                Rule::DanglingReference,
                format!("{} maps to {}, outside the piece", x.id, x.image),
            );
        }
    }
    let new_ids: Vec<PointId> = (0..p)
        .map(|i| data.z_id(i))
        .chain((0..data.beta.len()).map(|j| data.center_id(j)))
        .collect();
    for id in &new_ids {
        if data.interior.contains(id) {
            report.push(
                Rule::DuplicateId,
                format!("interior point {id} clashes with a generated id"),
            );
        }
    }

    let interior: i64 = data
        .interior
        .points
        .iter()
        .filter(|x| !stars.contains(&x.id))
        .map(|x| i64::from(x.local_degree.saturating_sub(1)))
        .sum();
    let disks: i64 = data.beta.iter().map(|b| i64::from(b.degree.saturating_sub(1))).sum();
    let caps: i64 = data.gamma.iter().map(|g| i64::from(g.degree.saturating_sub(1))).sum();
    let total = interior + disks + caps;
    if total != 2 * d - 2 {
        report.push_residual(
            Rule::RiemannHurwitz,
            format!(
                "Riemann–Hurwitz: {interior} + {disks} + {caps} = {total} ≠ {}",
                2 * d - 2
            ),
            total - (2 * d - 2),
        );
    }
    report
}

/// A cycle of the new points `z_i` under `f̃`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZCycle {
    pub points: Vec<PointId>,
    /// Product of the `d_γ` along the cycle.
    pub degree: u64,
    /// Set when the cycle was recorded as attracting with the default multiplier.
    pub defaulted_multiplier: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedCovering {
    pub spec: CoveringSpec,
    /// `z_i`, in γ order.
    pub new_marked: Vec<PointId>,
    pub z_cycles: Vec<ZCycle>,
    /// Critical centers added for peripheral disks without a marked point.
    pub centers: Vec<PointId>,
    pub classification: CoveringType,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendOptions {
    /// Modulus recorded for `z`-cycles on which every `d_γ` is 1.
    pub default_multiplier: Rational,
}

impl Default for ExtendOptions {
    fn default() -> Self {
        Self {
            default_multiplier: Rational::new(BigInt::one(), BigInt::from(2)),
        }
    }
}

/// Cycles of a self-map of `0..n`, each starting at its smallest index.
fn index_cycles(image: &[usize]) -> Vec<Vec<usize>> {
    let n = image.len();
    let mut on_cycle = vec![false; n];
    for start in 0..n {
        let mut x = start;
        for _ in 0..n {
            x = image[x];
        }
        on_cycle[x] = true;
    }
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if !on_cycle[start] || seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut x = image[start];
        while x != start {
            seen[x] = true;
            cycle.push(x);
            x = image[x];
        }
        out.push(cycle);
    }
    out
}

pub fn extend(data: &PeriodicPieceData, options: &ExtendOptions) -> Result<ExtendedCovering> {
    validate_extension(data).into_result()?;

    let z: Vec<PointId> = (0..data.gamma.len()).map(|i| data.z_id(i)).collect();
    let mut points: Vec<MarkedPoint> = data.interior.points.clone();
    for b in &data.beta {
        if let Some(star) = &b.z_star {
            let x = points.iter_mut().find(|x| &x.id == star).expect("validated");
            x.image = z[b.target].clone();
            x.local_degree = b.degree;
        }
    }
    for (i, g) in data.gamma.iter().enumerate() {
        points.push(MarkedPoint::new(z[i].clone(), z[g.image].clone(), g.degree).with_role(PointRole::ExtraMarked));
    }
    let mut centers = Vec::new();
    for (j, b) in data.beta.iter().enumerate() {
        if b.z_star.is_none() && b.degree >= 2 {
            let c = data.center_id(j);
            points.push(MarkedPoint::new(c.clone(), z[b.target].clone(), b.degree).with_role(PointRole::ExtraMarked));
            centers.push(c);
        }
    }

    let mut spec = CoveringSpec::new(data.degree, points);
    spec.cycles = data.interior.cycles.clone();
    spec.shield = data.interior.shield.clone();
    spec.p_finite = data.interior.p_finite;
    spec.complete = data.interior.complete;

    let images: Vec<usize> = data.gamma.iter().map(|g| g.image).collect();
    let mut z_cycles = Vec::new();
    for cycle in index_cycles(&images) {
        let degree: u64 = cycle.iter().map(|&i| u64::from(data.gamma[i].degree)).product();
        let ids: Vec<PointId> = cycle.iter().map(|&i| z[i].clone()).collect();
        let mut defaulted = None;
        if degree > 1 {
            spec.cycles.push(AccumulationCycle {
                points: ids.clone(),
                kind: CycleKind::Superattracting { power: degree as u32 },
            });
        } else if !spec.p_finite {
            // The boundary maps are homeomorphisms here and fix no multiplier.
            spec.cycles.push(AccumulationCycle {
                points: ids.clone(),
                kind: CycleKind::Attracting {
                    modulus: options.default_multiplier.clone(),
                },
            });
            defaulted = Some(options.default_multiplier.clone());
        }
        z_cycles.push(ZCycle {
            points: ids,
            degree,
            defaulted_multiplier: defaulted,
        });
    }

    validate_spec(&spec).into_result()?;
    let classification = classify_type(&spec)?;
    Ok(ExtendedCovering {
        spec,
        new_marked: z,
        z_cycles,
        centers,
        classification,
    })
}

pub fn classify_extended(ext: &ExtendedCovering) -> Result<CoveringType> {
    classify_type(&ext.spec)
}

fn is_sub_multiset(sub: &[PreimageComponent], of: &[PreimageComponent]) -> bool {
    let mut counts: BTreeMap<&PreimageComponent, i64> = BTreeMap::new();
    for c in of {
        *counts.entry(c).or_default() += 1;
    }
    for c in sub {
        let n = counts.entry(c).or_default();
        *n -= 1;
        if *n < 0 {
            return false;
        }
    }
    true
}

/// Pullback table of `f̃` on the interior curves and the marked points of `f̃`.
pub fn induced_pullback(original: &PullbackTable, data: &PeriodicPieceData) -> Result<PullbackTable> {
    validate_extension(data).into_result()?;
    let flags = |msg: String| Error::ContainmentFlags(msg);
    let level = compose_table(original, data.period)?;
    let d = u64::from(data.degree);
    let z: Vec<PointId> = (0..data.gamma.len()).map(|i| data.z_id(i)).collect();
    let interior_curves: BTreeSet<&CurveId> = data.interior_curves.iter().collect();

    let mut points: BTreeSet<PointId> = data.interior.points.iter().map(|x| x.id.clone()).collect();
    points.extend(z.iter().cloned());
    let centers: Vec<Option<PointId>> = data
        .beta
        .iter()
        .enumerate()
        .map(|(j, b)| (b.z_star.is_none() && b.degree >= 2).then(|| data.center_id(j)))
        .collect();
    points.extend(centers.iter().flatten().cloned());

    let mut table = PullbackTable::new(d, data.interior_curves.clone(), points);

    let reclassify = |key: &CurveClass, comp: &PreimageComponent| -> Result<PreimageComponent> {
        let class = match &comp.class {
            CurveClass::Curve(c) if interior_curves.contains(c) => comp.class.clone(),
            CurveClass::Curve(c) => match data.gamma.iter().position(|g| &g.curve == c) {
                Some(i) => CurveClass::Peripheral(z[i].clone()),
                None => {
                    return Err(flags(format!(
                        "preimage of {key} in the piece has class {c}, which is not inside it"
                    )))
                }
            },
            CurveClass::Peripheral(x) if data.interior.contains(x) => comp.class.clone(),
            CurveClass::Peripheral(x) => {
                return Err(flags(format!(
                    "preimage of {key} in the piece surrounds {x}, outside it"
                )));
            }
            CurveClass::Trivial => CurveClass::Trivial,
        };
        Ok(PreimageComponent::new(class, comp.degree))
    };

    let mut keys: Vec<CurveClass> = data
        .interior_curves
        .iter()
        .map(|c| CurveClass::Curve(c.clone()))
        .collect();
    for key in data.containment.keys() {
        if !keys.contains(key) {
            match key {
                CurveClass::Peripheral(x) if data.interior.contains(x) => keys.push(key.clone()),
                other => {
                    return Err(flags(format!(
                        "containment declared for {other}, which is not inside the piece"
                    )))
                }
            }
        }
    }
    for key in &keys {
        let declared = data
            .containment
            .get(key)
            .ok_or_else(|| flags(format!("no containment declared for {key}")))?;
        let full = level
            .entries
            .get(key)
            .ok_or_else(|| flags(format!("{key} has no level-{} pullback entry", data.period)))?;
        let mut declared = declared.clone();
        canonicalize(&mut declared);
        if !is_sub_multiset(&declared, full) {
            return Err(flags(format!(
                "components declared inside the piece for {key} are not among its level-{} preimages",
                data.period
            )));
        }
        let sum: u64 = declared.iter().map(|c| c.degree).sum();
        if sum != d {
            return Err(flags(format!(
                "components of {key} inside the piece have degree sum {sum} ≠ {d}"
            )));
        }
        let mut comps = declared
            .iter()
            .map(|c| reclassify(key, c))
            .collect::<Result<Vec<_>>>()?;
        canonicalize(&mut comps);
        table.insert(key.clone(), comps);
    }

    // Small circles around z_i pull back to circles around the z_j, z* and
    // disk centers mapping to z_i.
    for (m, zm) in z.iter().enumerate() {
        let mut comps = Vec::new();
        for (i, g) in data.gamma.iter().enumerate() {
            if g.image == m {
                comps.push(PreimageComponent::new(
                    CurveClass::Peripheral(z[i].clone()),
                    u64::from(g.degree),
                ));
            }
        }
        for (j, b) in data.beta.iter().enumerate() {
            if b.target == m {
                let class = match (&b.z_star, &centers[j]) {
                    (Some(x), _) | (None, Some(x)) => CurveClass::Peripheral(x.clone()),
                    (None, None) => CurveClass::Trivial,
                };
                comps.push(PreimageComponent::new(class, u64::from(b.degree)));
            }
        }
        canonicalize(&mut comps);
        table.insert(CurveClass::Peripheral(zm.clone()), comps);
    }
    for c in centers.iter().flatten() {
        // Nothing marked maps to a disk center.
        table.insert(
            CurveClass::Peripheral(c.clone()),
            vec![PreimageComponent::new(CurveClass::Trivial, 1); d as usize],
        );
    }
    Ok(table)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Realizable,
    NotHyperbolic,
    Obstructed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub signature: OrbifoldSignature,
    pub orbifold: OrbifoldType,
    pub covering_type: CoveringType,
    pub obstructions: Vec<ObstructionCandidate>,
    /// `z`-cycles whose multiplier was filled in by default.
    pub defaulted_cycles: Vec<Vec<PointId>>,
}

impl Verdict {
    pub fn is_realizable(&self) -> bool {
        self.outcome == Outcome::Realizable
    }

    pub fn summary(&self) -> String {
        match self.outcome {
            Outcome::Realizable => match self.covering_type {
                CoveringType::PostcriticallyFinite => "realizable: combinatorially equivalent to a rational map".into(),
                CoveringType::SubHyperbolicSemiRational => "realizable: CLH-equivalent to a rational map".into(),
            },
            Outcome::NotHyperbolic => format!("precondition failed: orbifold not hyperbolic ({})", self.orbifold),
            Outcome::Obstructed => "obstructed in declared universe".into(),
        }
    }

    pub const SCOPE: &'static str =
        "the obstruction search covers only the declared curve universe; curves outside it are not examined";

    pub const UNIQUENESS: &'static str =
        "when realizable, the rational map is unique up to conjugation by a Möbius transformation";
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

pub fn realizability_report(ext: &ExtendedCovering, induced: &PullbackTable, universe_cap: usize) -> Result<Verdict> {
    let signature = compute_signature(&ext.spec)?;
    let orbifold = orbifold_type(&signature);
    let covering_type = classify_extended(ext)?;
    let obstructions = search_obstructions(induced, universe_cap)?;
    let outcome = if orbifold != OrbifoldType::Hyperbolic {
        Outcome::NotHyperbolic
    } else if !obstructions.is_empty() {
        Outcome::Obstructed
    } else {
        Outcome::Realizable
    };
    Ok(Verdict {
        outcome,
        signature,
        orbifold,
        covering_type,
        obstructions,
        defaulted_cycles: ext
            .z_cycles
            .iter()
            .filter(|c| c.defaulted_multiplier.is_some())
            .map(|c| c.points.clone())
            .collect(),
    })
}
