//! Seeded generators of random valid instances for property and acceptance
//! tests.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherecover_core::curves::{CurveClass, PreimageComponent, PullbackTable};
use spherecover_core::decomposition::{Annulus0, Annulus1, BoundaryKind, Level1Piece, Piece, StandardFormSpec};
use spherecover_core::model::{CoveringSpec, MarkedPoint};
use spherecover_core::thurston::LengthTrace;
use spherecover_core::{AnnulusId, BoundaryId, CurveId, PieceId, PointId, Rational};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A random composition of `n` into positive parts.
pub fn composition(rng: &mut impl Rng, n: u64) -> Vec<u64> {
    let mut parts = Vec::new();
    let mut left = n;
    while left > 0 {
        let k = rng.gen_range(1..=left);
        parts.push(k);
        left -= k;
    }
    parts
}

fn point_ids(n: usize) -> Vec<PointId> {
    (0..n).map(|i| PointId::from(format!("p{i}"))).collect()
}

/// A table passing `validate_table` with a peripheral entry for every point,
/// so that every iterate can be composed.
pub fn random_table(rng: &mut impl Rng, max_universe: usize, max_degree: u64) -> PullbackTable {
    let d = rng.gen_range(2..=max_degree);
    let n = rng.gen_range(1..=max_universe);
    let points = point_ids(rng.gen_range(0..=3));
    table_over(rng, d, n, &points)
}

fn table_over(rng: &mut impl Rng, d: u64, n: usize, points: &[PointId]) -> PullbackTable {
    let universe: Vec<CurveId> = (0..n).map(|i| CurveId::from(format!("c{i}"))).collect();
    let mut table = PullbackTable::new(d, universe.clone(), points.iter().cloned().collect());
    let peripheral_or_trivial = |rng: &mut dyn rand::RngCore| -> CurveClass {
        if !points.is_empty() && rng.gen_bool(0.6) {
            CurveClass::Peripheral(points.choose(rng).unwrap().clone())
        } else {
            CurveClass::Trivial
        }
    };
    for c in &universe {
        let comps = composition(rng, d)
            .into_iter()
            .map(|e| {
                let class = if rng.gen_bool(0.6) {
                    CurveClass::Curve(universe.choose(rng).unwrap().clone())
                } else {
                    peripheral_or_trivial(rng)
                };
                PreimageComponent::new(class, e)
            })
            .collect();
        table.insert(CurveClass::Curve(c.clone()), comps);
    }
    for p in points {
        let comps = composition(rng, d)
            .into_iter()
            .map(|e| PreimageComponent::new(peripheral_or_trivial(rng), e))
            .collect();
        table.insert(CurveClass::Peripheral(p.clone()), comps);
    }
    table
}

/// A complete post-critically finite portrait: critical points exhaust the
/// Riemann–Hurwitz budget `2d − 2`, plus a few regular marked points.
pub fn random_covering(rng: &mut impl Rng) -> CoveringSpec {
    let d: u32 = rng.gen_range(2..=4);
    let mut degrees = Vec::new();
    let mut budget = 2 * d - 2;
    while budget > 0 {
        let e = rng.gen_range(2..=d.min(budget + 1));
        degrees.push(e);
        budget -= e - 1;
    }
    let unramified = rng.gen_range(0..=3);
    degrees.extend(std::iter::repeat_n(1, unramified));
    let ids = point_ids(degrees.len());
    let points = degrees
        .iter()
        .zip(&ids)
        .map(|(&e, id)| MarkedPoint::new(id.clone(), ids.choose(rng).unwrap().clone(), e))
        .collect();
    CoveringSpec::new(d, points)
}

/// A portrait together with a pullback table over its marked points.
pub fn random_document(rng: &mut impl Rng) -> (CoveringSpec, PullbackTable) {
    let spec = random_covering(rng);
    let ids: Vec<PointId> = spec.points.iter().map(|p| p.id.clone()).collect();
    let n = rng.gen_range(1..=4);
    let table = table_over(rng, u64::from(spec.degree), n, &ids);
    (spec, table)
}

const ENTRIES: [(i64, i64); 6] = [(0, 1), (1, 4), (1, 3), (1, 2), (1, 1), (2, 1)];

fn entry(rng: &mut impl Rng) -> Rational {
    if rng.gen_bool(0.4) {
        return q(0, 1);
    }
    let (n, d) = ENTRIES[rng.gen_range(0..ENTRIES.len())];
    q(n, d)
}

pub fn random_matrix(rng: &mut impl Rng, dim: usize) -> Vec<Vec<Rational>> {
    (0..dim).map(|_| (0..dim).map(|_| entry(rng)).collect()).collect()
}

/// A matrix with spectral radius exactly 1, hidden by a permutation
/// similarity: block upper triangular, each diagonal block a scalar or a
/// weighted 2-cycle, with at least one block of radius 1.
pub fn tie_matrix(rng: &mut impl Rng, dim: usize) -> Vec<Vec<Rational>> {
    assert!(dim >= 1);
    let mut a = vec![vec![q(0, 1); dim]; dim];
    let mut blocks: Vec<(usize, usize)> = Vec::new();
    let mut i = 0;
    while i < dim {
        let len = if i + 1 < dim && rng.gen_bool(0.4) { 2 } else { 1 };
        blocks.push((i, len));
        i += len;
    }
    let tie = rng.gen_range(0..blocks.len());
    for (b, &(start, len)) in blocks.iter().enumerate() {
        let exact = b == tie;
        if len == 1 {
            a[start][start] = if exact {
                q(1, 1)
            } else {
                [q(0, 1), q(1, 4), q(1, 3), q(1, 2), q(1, 1)]
                    .choose(rng)
                    .unwrap()
                    .clone()
            };
        } else {
            type Pair = ((i64, i64), (i64, i64));
            let pairs: &[Pair] = if exact {
                &[((2, 1), (1, 2)), ((1, 1), (1, 1)), ((1, 2), (2, 1))]
            } else {
                &[((1, 2), (1, 2)), ((1, 4), (2, 1)), ((1, 3), (1, 1)), ((1, 1), (1, 1))]
            };
            let ((n1, d1), (n2, d2)) = *pairs.choose(rng).unwrap();
            a[start][start + 1] = q(n1, d1);
            a[start + 1][start] = q(n2, d2);
        }
        // Coupling into later blocks keeps the block triangular shape.
        for row in &mut a[start..start + len] {
            for cell in &mut row[start + len..dim] {
                *cell = entry(rng);
            }
        }
    }
    let mut perm: Vec<usize> = (0..dim).collect();
    perm.shuffle(rng);
    (0..dim)
        .map(|i| (0..dim).map(|j| a[perm[i]][perm[j]].clone()).collect())
        .collect()
}

/// A random standard form over a tree of pieces, with its intended carriers.
pub struct RandomForm {
    pub spec: StandardFormSpec,
    pub carriers: BTreeMap<PieceId, PieceId>,
}

pub fn random_standard_form(rng: &mut impl Rng) -> RandomForm {
    let m = rng.gen_range(1..=5);
    let pid = |i: usize| PieceId::from(format!("P{i}"));
    let aid = |i: usize| AnnulusId::from(format!("A{i}"));
    let mut spec = StandardFormSpec::default();
    let mut boundary: Vec<BTreeSet<BoundaryId>> = vec![BTreeSet::new(); m + 1];
    for i in 1..=m {
        let parent = rng.gen_range(0..i);
        let curve = CurveId::from(format!("g{i}"));
        let sides = [BoundaryId::from(format!("g{i}a")), BoundaryId::from(format!("g{i}b"))];
        boundary[parent].insert(sides[0].clone());
        boundary[i].insert(sides[1].clone());
        spec.curves.push(curve.clone());
        spec.annuli0.push(Annulus0 {
            id: aid(i),
            core: curve.clone(),
            sides,
        });
        let shares: Vec<[bool; 2]> = match rng.gen_range(0..3) {
            0 => vec![[true, true]],
            1 => vec![[true, false], [false, true]],
            _ => vec![[true, false], [false, false], [false, true]],
        };
        for (k, s) in shares.into_iter().enumerate() {
            spec.annuli1.push(Annulus1 {
                id: AnnulusId::from(format!("A{i}.{k}")),
                contained_in: aid(i),
                homotopic_to: curve.clone(),
                maps_to: aid(rng.gen_range(1..=m)),
                shares: s,
                degree: rng.gen_range(1..=3),
            });
        }
    }

    let mut carriers = BTreeMap::new();
    for (i, bdry) in boundary.iter().enumerate() {
        let marked: BTreeSet<PointId> = (0..rng.gen_range(0..=2))
            .map(|k| PointId::from(format!("x{i}.{k}")))
            .collect();
        spec.pieces0.push(Piece {
            id: pid(i),
            boundary: bdry.clone(),
            marked: marked.clone(),
        });
        let holes = rng.gen_range(0..=2);
        let mut carrier_boundary: Vec<(BoundaryId, BoundaryKind)> =
            bdry.iter().map(|b| (b.clone(), BoundaryKind::Inherited)).collect();
        for h in 0..holes {
            let circle = BoundaryId::from(format!("P{i}.r{h}"));
            carrier_boundary.push((circle.clone(), BoundaryKind::Peripheral));
            spec.pieces1.push(Level1Piece {
                id: PieceId::from(format!("P{i}.d{h}")),
                maps_to: pid(rng.gen_range(0..=m)),
                degree: rng.gen_range(1..=3),
                contained_in: pid(i),
                boundary: vec![(circle, BoundaryKind::Peripheral)],
                marked: BTreeSet::new(),
            });
        }
        carrier_boundary.shuffle(rng);
        let carrier = PieceId::from(format!("P{i}'"));
        spec.pieces1.push(Level1Piece {
            id: carrier.clone(),
            maps_to: pid(rng.gen_range(0..=m)),
            degree: rng.gen_range(1..=3),
            contained_in: pid(i),
            boundary: carrier_boundary,
            marked,
        });
        carriers.insert(pid(i), carrier);
    }
    spec.pieces1.shuffle(rng);
    RandomForm { spec, carriers }
}

/// Halving lengths on `decaying`, the constant `2 · floor` elsewhere.
pub fn geometric_trace(
    rng: &mut impl Rng,
    curves: &[CurveId],
    decaying: &BTreeSet<CurveId>,
    floor: f64,
) -> LengthTrace {
    let steps = rng.gen_range(12..=20);
    let starts: Vec<f64> = curves.iter().map(|_| floor * rng.gen_range(1.0..10.0)).collect();
    let samples = (0..steps)
        .map(|n| {
            curves
                .iter()
                .zip(&starts)
                .map(|(c, l0)| {
                    if decaying.contains(c) {
                        l0 * 0.5f64.powi(n)
                    } else {
                        2.0 * floor
                    }
                })
                .collect()
        })
        .collect();
    LengthTrace {
        curves: curves.to_vec(),
        samples,
    }
}

/// A uniformly random subset.
pub fn random_subset<T: Clone + Ord>(rng: &mut impl Rng, items: &[T]) -> BTreeSet<T> {
    items.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Parameter grid for each bound, keyed by its command-line name.
pub fn estimate_inputs(formula: &str) -> Vec<Vec<Rational>> {
    let unit = [q(1, 1000), q(1, 10), q(1, 3), q(1, 2), q(3, 4), q(99, 100)];
    let positive = [q(1, 1000), q(1, 10), q(1, 2), q(1, 1), q(157, 100), q(3, 1), q(10, 1)];
    let k1 = [q(1, 10), q(1, 2), q(1, 1), q(2, 1), q(5, 1)];
    let single = |xs: &[Rational]| xs.iter().map(|x| vec![x.clone()]).collect::<Vec<_>>();
    let pairs = |xs: &[Rational], ys: &[Rational]| {
        xs.iter()
            .flat_map(|x| ys.iter().map(move |y| vec![x.clone(), y.clone()]))
            .collect::<Vec<_>>()
    };
    match formula {
        "collar" => single(&positive),
        "zeta" | "poincare" => single(&unit),
        "r0" | "samebig-c" => single(&k1),
        "thin-cut" => pairs(&[q(1, 10), q(1, 1), q(4, 1), q(1000, 1)], &k1),
        "separation" => single(&[q(1, 1000), q(1, 1), q(10, 1), q(535, 1)]),
        "capped-length" => pairs(&positive, &[q(11, 10), q(2, 1), q(7, 1)]),
        "zj-floor" => pairs(&positive, &[q(1, 100), q(1, 2), q(9, 10)]),
        _ => Vec::new(),
    }
}
