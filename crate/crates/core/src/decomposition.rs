//! Standard-form thick/thin decompositions along an obstruction.
//!
//! The thin part is one annulus `A_0` per obstruction curve; the thick parts
//! are the complementary pieces. Their preimages under `f` (level-1 annuli
//! and level-1 pieces) are declared by the user, and this module checks the
//! declared combinatorics and derives the self-map `τ` on thick pieces.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::model::CoveringSpec;
use crate::{AnnulusId, BoundaryId, CurveId, Error, PieceId, PointId, Result, Rule, ValidationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annulus0 {
    pub id: AnnulusId,
    pub core: CurveId,
    /// The two boundary circles, as instance ids shared with the adjacent pieces.
    pub sides: [BoundaryId; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annulus1 {
    pub id: AnnulusId,
    pub contained_in: AnnulusId,
    pub homotopic_to: CurveId,
    /// The level-0 annulus it maps onto.
    pub maps_to: AnnulusId,
    /// Whether it shares side 0 / side 1 of its containing annulus.
    pub shares: [bool; 2],
    /// Degree of `z ↦ z^d` on the annulus.
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub id: PieceId,
    pub boundary: BTreeSet<BoundaryId>,
    pub marked: BTreeSet<PointId>,
}

impl Piece {
    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundaryKind {
    /// Bounds a disk containing at most one marked point.
    Peripheral,
    /// A boundary circle of the containing level-0 piece.
    Inherited,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level1Piece {
    pub id: PieceId,
    pub maps_to: PieceId,
    pub degree: u32,
    pub contained_in: PieceId,
    pub boundary: Vec<(BoundaryId, BoundaryKind)>,
    pub marked: BTreeSet<PointId>,
}

impl Level1Piece {
    pub fn boundary_count(&self) -> usize {
        self.boundary.len()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StandardFormSpec {
    /// The obstruction `Γ_c`.
    pub curves: Vec<CurveId>,
    pub annuli0: Vec<Annulus0>,
    pub annuli1: Vec<Annulus1>,
    pub pieces0: Vec<Piece>,
    pub pieces1: Vec<Level1Piece>,
}

impl StandardFormSpec {
    pub fn piece(&self, id: &PieceId) -> Option<&Piece> {
        self.pieces0.iter().find(|p| &p.id == id)
    }

    pub fn annulus0(&self, id: &AnnulusId) -> Option<&Annulus0> {
        self.annuli0.iter().find(|a| &a.id == id)
    }
}

fn check_unique<'a, T: Ord + fmt::Display + 'a>(
    report: &mut ValidationReport,
    kind: &str,
    ids: impl Iterator<Item = &'a T>,
) {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            report.push(Rule::DuplicateId, format!("{kind} {id} declared twice"));
        }
    }
}

/// Structural checks of a standard-form decomposition.
pub fn validate_standard_form(spec: &StandardFormSpec) -> ValidationReport {
    let mut report = ValidationReport::new();
    check_unique(&mut report, "curve", spec.curves.iter());
    check_unique(
        &mut report,
        "annulus",
        spec.annuli0
            .iter()
            .map(|a| &a.id)
            .chain(spec.annuli1.iter().map(|a| &a.id)),
    );
    check_unique(
        &mut report,
        "piece",
        spec.pieces0
            .iter()
            .map(|p| &p.id)
            .chain(spec.pieces1.iter().map(|p| &p.id)),
    );

    // Every obstruction curve is the core of exactly one thin annulus.
    for c in &spec.curves {
        let n = spec.annuli0.iter().filter(|a| &a.core == c).count();
        if n != 1 {
            report.push(
                Rule::CoreCurve,
                format!("curve {c} is the core of {n} level-0 annuli, expected 1"),
            );
        }
    }
    for a in &spec.annuli0 {
        if !spec.curves.contains(&a.core) {
            report.push(
                Rule::CoreCurve,
                format!("annulus {} has core {} outside the obstruction", a.id, a.core),
            );
        }
        if a.sides[0] == a.sides[1] {
            report.push(
                Rule::PieceBoundary,
                format!("annulus {} uses {} for both sides", a.id, a.sides[0]),
            );
        }
    }

    for a in &spec.annuli1 {
        match spec.annulus0(&a.contained_in) {
            None => report.push(
                Rule::DanglingReference,
                format!("level-1 annulus {} lies in undeclared annulus {}", a.id, a.contained_in),
            ),
            Some(outer) if outer.core != a.homotopic_to => report.push(
                Rule::Containment,
                format!(
                    "level-1 annulus {} is homotopic to {} but lies in {} with core {}",
                    a.id, a.homotopic_to, outer.id, outer.core
                ),
            ),
            Some(_) => {}
        }
        if spec.annulus0(&a.maps_to).is_none() {
            report.push(
                Rule::DanglingReference,
                format!("level-1 annulus {} maps to undeclared annulus {}", a.id, a.maps_to),
            );
        }
        if a.degree == 0 {
            report.push(Rule::BoundaryDegree, format!("level-1 annulus {} has degree 0", a.id));
        }
    }

    // The outermost level-1 annuli share both boundary circles of A_0.
    for outer in &spec.annuli0 {
        let inside: Vec<&Annulus1> = spec.annuli1.iter().filter(|a| a.contained_in == outer.id).collect();
        if inside.is_empty() {
            report.push(
                Rule::BoundarySharing,
                format!("annulus {} contains no level-1 annulus", outer.id),
            );
            continue;
        }
        for side in 0..2 {
            let n = inside.iter().filter(|a| a.shares[side]).count();
            if n != 1 {
                report.push(
                    Rule::BoundarySharing,
                    format!(
                        "boundary {} of annulus {} is shared by {n} level-1 annuli, expected 1",
                        outer.sides[side], outer.id
                    ),
                );
            }
        }
    }

    // Each boundary circle of a thin annulus bounds exactly one thick piece.
    let mut circles: BTreeMap<&BoundaryId, usize> = BTreeMap::new();
    for a in &spec.annuli0 {
        for s in &a.sides {
            circles.insert(s, 0);
        }
    }
    for p in &spec.pieces0 {
        for b in &p.boundary {
            match circles.get_mut(b) {
                Some(n) => *n += 1,
                None => report.push(
                    Rule::PieceBoundary,
                    format!(
                        "piece {} has boundary {b} that is not a side of a level-0 annulus",
                        p.id
                    ),
                ),
            }
        }
    }
    for (b, n) in &circles {
        if *n != 1 {
            report.push(
                Rule::PieceBoundary,
                format!("boundary {b} bounds {n} pieces, expected 1"),
            );
        }
    }

    let euler: i64 = spec.pieces0.iter().map(|p| 2 - p.boundary_count() as i64).sum();
    if euler != 2 {
        report.push_residual(
            Rule::EulerCount,
            format!("Σ (2 − boundary count) over pieces is {euler} ≠ 2"),
            euler - 2,
        );
    }

    let mut marked_owner: BTreeMap<&PointId, &PieceId> = BTreeMap::new();
    for p in &spec.pieces0 {
        for x in &p.marked {
            if let Some(other) = marked_owner.insert(x, &p.id) {
                report.push(
                    Rule::DuplicateId,
                    format!("marked point {x} lies in both {other} and {}", p.id),
                );
            }
        }
    }

    for p in &spec.pieces1 {
        if p.degree == 0 {
            report.push(Rule::BoundaryDegree, format!("level-1 piece {} has degree 0", p.id));
        }
        if spec.piece(&p.maps_to).is_none() {
            report.push(
                Rule::DanglingReference,
                format!("level-1 piece {} maps to undeclared piece {}", p.id, p.maps_to),
            );
        }
        match spec.piece(&p.contained_in) {
            None => report.push(
                Rule::DanglingReference,
                format!("level-1 piece {} lies in undeclared piece {}", p.id, p.contained_in),
            ),
            Some(outer) => {
                for (b, kind) in &p.boundary {
                    if *kind == BoundaryKind::Inherited && !outer.boundary.contains(b) {
                        report.push(
                            Rule::Containment,
                            format!(
                                "level-1 piece {} inherits {b}, which is not a boundary of {}",
                                p.id, outer.id
                            ),
                        );
                    }
                }
                for x in &p.marked {
                    if !outer.marked.contains(x) {
                        report.push(
                            Rule::Containment,
                            format!("level-1 piece {} holds {x}, which is not in {}", p.id, outer.id),
                        );
                    }
                }
            }
        }
        check_unique(&mut report, "boundary", p.boundary.iter().map(|(b, _)| b));
    }
    report
}

/// Checks that need the covering: marked points partitioned by the pieces,
/// images of level-1 marked points, and that the level-1 pieces over each
/// thick piece cover it with total degree `d`.
pub fn validate_against_covering(spec: &StandardFormSpec, covering: &CoveringSpec) -> ValidationReport {
    let mut report = ValidationReport::new();
    for x in &covering.points {
        let n = spec.pieces0.iter().filter(|p| p.marked.contains(&x.id)).count();
        if n != 1 {
            report.push(
                Rule::Containment,
                format!("marked point {} lies in {n} pieces, expected 1", x.id),
            );
        }
        let m = spec.pieces1.iter().filter(|p| p.marked.contains(&x.id)).count();
        if m != 1 {
            report.push(
                Rule::Containment,
                format!("marked point {} lies in {m} level-1 pieces, expected 1", x.id),
            );
        }
    }
    for p in spec.pieces0.iter() {
        for x in &p.marked {
            if !covering.contains(x) {
                report.push(
                    Rule::DanglingReference,
                    format!("piece {} holds undeclared point {x}", p.id),
                );
            }
        }
    }
    for p in &spec.pieces1 {
        let Some(target) = spec.piece(&p.maps_to) else { continue };
        for x in &p.marked {
            if let Some(img) = covering.image_of(x) {
                if !target.marked.contains(img) {
                    report.push(
                        Rule::Containment,
                        format!("{x} in level-1 piece {} maps to {img}, outside {}", p.id, target.id),
                    );
                }
            }
        }
    }
    let d = i64::from(covering.degree);
    for target in &spec.pieces0 {
        let sum: i64 = spec
            .pieces1
            .iter()
            .filter(|p| p.maps_to == target.id)
            .map(|p| i64::from(p.degree))
            .sum();
        if sum != d {
            report.push_residual(
                Rule::Bookkeeping,
                format!("level-1 pieces over {} have total degree {sum} ≠ {d}", target.id),
                sum - d,
            );
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ComponentClass {
    Disk,
    PuncturedDisk,
    Annulus,
    Complex,
}

impl fmt::Display for ComponentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentClass::Disk => "disk",
            ComponentClass::PuncturedDisk => "punctured disk",
            ComponentClass::Annulus => "annulus",
            ComponentClass::Complex => "complex",
        })
    }
}

pub fn classify_component(boundary_count: usize, marked_count: usize) -> ComponentClass {
    match (boundary_count, marked_count) {
        (1, 0) => ComponentClass::Disk,
        (1, 1) => ComponentClass::PuncturedDisk,
        (2, 0) => ComponentClass::Annulus,
        _ => ComponentClass::Complex,
    }
}

fn violated(piece: &PieceId, reason: String) -> Error {
    Error::StandardFormViolated {
        piece: piece.clone(),
        reason,
    }
}

/// The unique level-1 piece inside `p0` whose boundary contains all of
/// `∂p0`, every other boundary circle being peripheral.
pub fn carrier_piece<'a>(p0: &Piece, level1: &'a [Level1Piece]) -> Result<&'a Level1Piece> {
    let candidates: Vec<&Level1Piece> = level1
        .iter()
        .filter(|q| q.contained_in == p0.id)
        .filter(|q| p0.boundary.iter().all(|b| q.boundary.iter().any(|(c, _)| c == b)))
        .filter(|q| {
            q.boundary
                .iter()
                .all(|(c, kind)| p0.boundary.contains(c) || *kind == BoundaryKind::Peripheral)
        })
        .collect();
    match candidates.as_slice() {
        [one] => Ok(one),
        [] => Err(violated(&p0.id, "no level-1 piece carries its boundary".into())),
        many => {
            let ids: Vec<String> = many.iter().map(|q| format!("{}", q.id)).collect();
            Err(violated(
                &p0.id,
                format!("several level-1 carriers: {}", ids.join(", ")),
            ))
        }
    }
}

/// A self-map of a finite set with its cycles and preperiods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PieceMap {
    pub tau: BTreeMap<PieceId, PieceId>,
    /// Each cycle in dynamical order, starting at its smallest id.
    pub cycles: Vec<Vec<PieceId>>,
    /// Steps needed to land on a cycle.
    pub tails: BTreeMap<PieceId, usize>,
}

impl PieceMap {
    pub fn from_tau(tau: BTreeMap<PieceId, PieceId>) -> Result<Self> {
        for (from, to) in &tau {
            if !tau.contains_key(to) {
                return Err(violated(from, format!("maps to {to}, which has no image")));
            }
        }
        let mut periodic = BTreeSet::new();
        for start in tau.keys() {
            // After |I| steps every orbit is on its cycle.
            let mut x = start;
            for _ in 0..tau.len() {
                x = &tau[x];
            }
            periodic.insert(x.clone());
            let mut y = &tau[x];
            while y != x {
                periodic.insert(y.clone());
                y = &tau[y];
            }
        }
        let mut cycles = Vec::new();
        let mut seen = BTreeSet::new();
        for start in &periodic {
            if seen.contains(start) {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            loop {
                seen.insert(x.clone());
                cycle.push(x.clone());
                x = &tau[x];
                if x == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        let tails = tau
            .keys()
            .map(|start| {
                let mut x = start;
                let mut n = 0;
                while !periodic.contains(x) {
                    x = &tau[x];
                    n += 1;
                }
                (start.clone(), n)
            })
            .collect();
        Ok(Self { tau, cycles, tails })
    }

    pub fn is_periodic(&self, id: &PieceId) -> bool {
        self.tails.get(id) == Some(&0)
    }

    /// Period of a periodic piece.
    pub fn period(&self, id: &PieceId) -> Option<usize> {
        self.cycles.iter().find(|c| c.contains(id)).map(Vec::len)
    }
}

pub fn piece_map(spec: &StandardFormSpec) -> Result<PieceMap> {
    let mut tau = BTreeMap::new();
    for p in &spec.pieces0 {
        let carrier = carrier_piece(p, &spec.pieces1)?;
        tau.insert(p.id.clone(), carrier.maps_to.clone());
    }
    PieceMap::from_tau(tau)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    pub thin: Vec<AnnulusId>,
    pub thick: Vec<PieceId>,
    pub level1: Vec<(PieceId, ComponentClass)>,
    pub carriers: BTreeMap<PieceId, PieceId>,
    pub piece_map: PieceMap,
}

impl DecompositionResult {
    pub fn periodic_pieces(&self) -> Vec<&PieceId> {
        self.thick.iter().filter(|p| self.piece_map.is_periodic(p)).collect()
    }
}

pub fn decomposition_report(spec: &StandardFormSpec) -> Result<DecompositionResult> {
    validate_standard_form(spec).into_result()?;
    let mut carriers = BTreeMap::new();
    for p in &spec.pieces0 {
        carriers.insert(p.id.clone(), carrier_piece(p, &spec.pieces1)?.id.clone());
    }
    let piece_map = piece_map(spec)?;
    // A total self-map of a non-empty finite set always has a cycle.
    assert!(spec.pieces0.is_empty() || !piece_map.cycles.is_empty());
    Ok(DecompositionResult {
        thin: spec.annuli0.iter().map(|a| a.id.clone()).collect(),
        thick: spec.pieces0.iter().map(|p| p.id.clone()).collect(),
        level1: spec
            .pieces1
            .iter()
            .map(|p| (p.id.clone(), classify_component(p.boundary_count(), p.marked.len())))
            .collect(),
        carriers,
        piece_map,
    })
}
