//! Documents: parsing with located errors, conversion to core types and
//! canonical emission.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use spherecover_core::curves::{CurveClass, Multicurve, PreimageComponent, PullbackTable};
use spherecover_core::decomposition::{Annulus0, Annulus1, BoundaryKind, Level1Piece, Piece, StandardFormSpec};
use spherecover_core::extension::{BetaCurve, GammaCurve, PeriodicPieceData};
use spherecover_core::model::{
    AccumulationCycle, CoveringSpec, CycleKind, MarkedPoint, PointRole, ShieldAnnulus, ShieldDisk, ShieldedStructure,
};
use spherecover_core::thurston::LengthTrace;
use spherecover_core::{AnnulusId, BoundaryId, CurveId, DiskId, PieceId, PointId, Rational};

use crate::dto::*;
use crate::source::{self, bare_message, Located, Location, Source};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum InputErrorKind {
    Syntax,
    Schema,
    UnknownKey,
    DuplicateId,
    DanglingReference,
}

impl InputErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InputErrorKind::Syntax => "syntax",
            InputErrorKind::Schema => "schema",
            InputErrorKind::UnknownKey => "unknown-key",
            InputErrorKind::DuplicateId => "duplicate-id",
            InputErrorKind::DanglingReference => "dangling-reference",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    pub kind: InputErrorKind,
    pub message: String,
    /// Primary position first; a duplicate also carries the first declaration.
    pub locations: Vec<Location>,
}

impl InputError {
    fn new(kind: InputErrorKind, message: impl Into<String>, locations: Vec<Location>) -> Self {
        Self {
            kind,
            message: message.into(),
            locations,
        }
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(at) = self.locations.first() {
            write!(f, "{at}: ")?;
        }
        write!(f, "{}: {}", self.kind.as_str(), self.message)?;
        if let Some(first) = self.locations.get(1) {
            write!(f, " (first declared at {first})")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedMulticurve {
    pub name: String,
    pub curves: Multicurve,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Document {
    pub name: Option<String>,
    pub description: Option<String>,
    pub covering: CoveringSpec,
    /// Empty universe and no entries when the document has no curve section.
    pub table: PullbackTable,
    pub multicurves: Vec<NamedMulticurve>,
    pub standard_form: Option<StandardFormSpec>,
    pub periodic_pieces: Vec<PeriodicPieceData>,
    pub traces: Option<LengthTrace>,
}

impl Document {
    pub fn has_curves(&self) -> bool {
        !self.table.universe.is_empty() || !self.table.entries.is_empty()
    }

    pub fn multicurve(&self, name: &str) -> Option<&Multicurve> {
        self.multicurves.iter().find(|m| m.name == name).map(|m| &m.curves)
    }

    pub fn periodic_piece(&self, piece: &str) -> Option<&PeriodicPieceData> {
        self.periodic_pieces.iter().find(|p| p.piece.as_str() == piece)
    }
}

#[derive(Clone, Debug)]
pub struct Parsed {
    pub document: Document,
    /// Unknown keys tolerated in lenient mode.
    pub warnings: Vec<InputError>,
}

/// Parses a document. Every problem found is returned, not just the first.
/// Unknown keys are errors unless `lenient`, in which case they become warnings.
pub fn parse(text: &str, lenient: bool) -> Result<Parsed, Vec<InputError>> {
    let src = Source::new(text);
    if let Err(e) = serde_json::from_str::<serde::de::IgnoredAny>(text) {
        return Err(vec![InputError::new(
            InputErrorKind::Syntax,
            bare_message(&e),
            vec![Location {
                line: e.line(),
                column: e.column(),
            }],
        )]);
    }

    source::reset_collector();
    let mut top_unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: Result<DocumentDto, _> = serde_ignored::deserialize(&mut de, |p| top_unknown.push(p.to_string()));
    let (nested_unknown, inner_error) = source::take_collector();
    let dto = match parsed {
        Ok(dto) => dto,
        Err(e) => {
            let (at, message) = match inner_error {
                Some((addr, message)) => (src.at_addr(addr), message),
                None => (
                    Location {
                        line: e.line(),
                        column: e.column(),
                    },
                    bare_message(&e),
                ),
            };
            return Err(vec![InputError::new(InputErrorKind::Schema, message, vec![at])]);
        }
    };

    let base = text.as_ptr() as usize;
    let mut unknown: Vec<InputError> = top_unknown
        .into_iter()
        .map(|p| (base, p))
        .chain(nested_unknown)
        .map(|(addr, path)| {
            let key = path.rsplit('.').next().unwrap_or(&path).to_string();
            let at = src.key_in_record(addr, &key).unwrap_or_else(|| src.at_addr(addr));
            InputError::new(InputErrorKind::UnknownKey, format!("unknown key `{path}`"), vec![at])
        })
        .collect();
    unknown.sort_by(|a, b| a.locations.cmp(&b.locations).then_with(|| a.message.cmp(&b.message)));

    let mut builder = Builder {
        src,
        errors: Vec::new(),
    };
    let document = builder.document(&dto);
    let mut errors = builder.errors;
    if !lenient {
        errors.extend(unknown.iter().cloned());
    }
    if !errors.is_empty() {
        errors.sort_by(|a, b| a.locations.cmp(&b.locations).then_with(|| a.kind.cmp(&b.kind)));
        return Err(errors);
    }
    Ok(Parsed {
        document,
        warnings: if lenient { unknown } else { Vec::new() },
    })
}

struct Builder<'a> {
    src: Source<'a>,
    errors: Vec<InputError>,
}

type Ids = BTreeSet<String>;

impl<'a> Builder<'a> {
    fn at(&self, addr: usize) -> Vec<Location> {
        if addr == 0 {
            Vec::new()
        } else {
            vec![self.src.at_addr(addr)]
        }
    }

    fn schema(&mut self, addr: usize, message: String) {
        let at = self.at(addr);
        self.errors.push(InputError::new(InputErrorKind::Schema, message, at));
    }

    fn require(&mut self, known: &Ids, id: &str, addr: usize, what: &str) {
        if !known.contains(id) {
            let at = self.at(addr);
            self.errors.push(InputError::new(
                InputErrorKind::DanglingReference,
                format!("{what} `{id}` is not declared"),
                at,
            ));
        }
    }

    /// Like `require`, located at `key` inside the record when it can be found.
    fn require_field(&mut self, known: &Ids, id: &str, addr: usize, key: &str, what: &str) {
        if !known.contains(id) {
            let at = if addr == 0 {
                Vec::new()
            } else {
                vec![self
                    .src
                    .key_in_record(addr, key)
                    .unwrap_or_else(|| self.src.at_addr(addr))]
            };
            self.errors.push(InputError::new(
                InputErrorKind::DanglingReference,
                format!("{what} `{id}` is not declared"),
                at,
            ));
        }
    }

    /// Collects ids, reporting each repeat against its first declaration.
    fn unique<'b>(&mut self, what: &str, items: impl IntoIterator<Item = (&'b str, usize)>) -> Ids {
        let mut first: BTreeMap<&str, usize> = BTreeMap::new();
        for (id, addr) in items {
            match first.get(id) {
                Some(&prev) => {
                    let mut at = self.at(addr);
                    at.extend(self.at(prev));
                    self.errors.push(InputError::new(
                        InputErrorKind::DuplicateId,
                        format!("{what} `{id}` declared twice"),
                        at,
                    ));
                }
                None => {
                    first.insert(id, addr);
                }
            }
        }
        first.into_keys().map(str::to_string).collect()
    }

    fn document(&mut self, dto: &DocumentDto) -> Document {
        if dto.format_version != FORMAT_VERSION {
            let base = self.src.text.as_ptr() as usize;
            let at = self.src.key_in_record(base, "format_version").into_iter().collect();
            self.errors.push(InputError::new(
                InputErrorKind::Schema,
                format!(
                    "format_version {} is not supported (expected {FORMAT_VERSION})",
                    dto.format_version
                ),
                at,
            ));
        }
        let (covering, points) = self.covering(&dto.covering, "point", true);

        let mut table = PullbackTable::new(
            u64::from(covering.degree),
            Vec::new(),
            points.iter().map(|p| PointId::new(p.as_str())).collect(),
        );
        let universe = dto.curves.as_ref().map(|c| {
            let ids = self.unique("curve", c.universe.iter().map(|u| (u.value.as_str(), u.addr)));
            let mut seen = BTreeSet::new();
            table.universe = c
                .universe
                .iter()
                .filter(|u| seen.insert(u.value.clone()))
                .map(|u| CurveId::new(u.value.as_str()))
                .collect();
            ids
        });
        if let Some(curves) = &dto.curves {
            let universe = universe.clone().unwrap_or_default();
            let entries = self.entries(&curves.pullback, &universe, &universe, &points, &points);
            table.entries = entries;
        }
        let universe_or_empty = universe.clone().unwrap_or_default();

        let names = self.unique(
            "multicurve",
            dto.multicurves.iter().map(|m| (m.value.name.as_str(), m.addr)),
        );
        debug_assert!(names.len() <= dto.multicurves.len());
        let mut multicurves = Vec::new();
        let mut taken = BTreeSet::new();
        for m in &dto.multicurves {
            for c in &m.value.curves {
                self.require(&universe_or_empty, c, m.addr, "curve");
            }
            match Multicurve::new(m.value.curves.iter().map(|c| CurveId::new(c.as_str())).collect()) {
                Ok(curves) if taken.insert(m.value.name.clone()) => multicurves.push(NamedMulticurve {
                    name: m.value.name.clone(),
                    curves,
                }),
                Ok(_) => {}
                Err(e) => self.schema(m.addr, format!("multicurve `{}`: {e}", m.value.name)),
            }
        }

        let mut piece_ids = None;
        let standard_form = dto.standard_form.as_ref().map(|sf| {
            let (spec, ids) = self.standard_form(sf, &points);
            piece_ids = Some(ids);
            spec
        });

        let unique_pieces = self.unique(
            "periodic piece",
            dto.periodic_pieces.iter().map(|p| (p.value.piece.as_str(), p.addr)),
        );
        debug_assert!(unique_pieces.len() <= dto.periodic_pieces.len());
        let periodic_pieces = dto
            .periodic_pieces
            .iter()
            .map(|p| self.periodic(p, piece_ids.as_ref(), universe.as_ref(), &points))
            .collect();

        let traces = dto.traces.as_ref().map(|t| {
            if let Some(universe) = &universe {
                for c in &t.value.curves {
                    self.require(universe, c, t.addr, "curve");
                }
            }
            let trace = LengthTrace {
                curves: t.value.curves.iter().map(|c| CurveId::new(c.as_str())).collect(),
                samples: t.value.samples.clone(),
            };
            if let Err(e) = trace.validate() {
                self.schema(t.addr, e.to_string());
            }
            trace
        });

        Document {
            name: dto.name.clone(),
            description: dto.description.clone(),
            covering,
            table,
            multicurves,
            standard_form,
            periodic_pieces,
            traces,
        }
    }

    /// Interior portraits of periodic pieces skip the image check: the
    /// center of a peripheral disk maps out of the piece.
    fn covering(&mut self, dto: &CoveringDto, what: &str, check_images: bool) -> (CoveringSpec, Ids) {
        let ids = self.unique(what, dto.points.iter().map(|p| (p.value.id.as_str(), p.addr)));
        let mut points = Vec::new();
        for p in &dto.points {
            if check_images {
                self.require_field(&ids, &p.value.image, p.addr, "image", "image point");
            }
            let role = match p.value.role {
                RoleDto::Postcritical => PointRole::Postcritical,
                RoleDto::Extra => PointRole::ExtraMarked,
                RoleDto::DiskCenter => PointRole::DiskCenter,
            };
            points.push(
                MarkedPoint::new(p.value.id.as_str(), p.value.image.as_str(), p.value.local_degree).with_role(role),
            );
        }

        let mut cycles = Vec::new();
        for c in &dto.cycles {
            for p in &c.value.points {
                self.require(&ids, p, c.addr, "cycle point");
            }
            let kind = match (c.value.kind, &c.value.modulus, c.value.power) {
                (CycleKindDto::Attracting, Some(m), None) => match Rational::from_str(m.trim()) {
                    Ok(modulus) => Some(CycleKind::Attracting { modulus }),
                    Err(_) => {
                        self.schema(c.addr, format!("modulus `{m}` is not a rational p/q"));
                        None
                    }
                },
                (CycleKindDto::Superattracting, None, Some(power)) => Some(CycleKind::Superattracting { power }),
                (CycleKindDto::Attracting, _, _) => {
                    self.schema(c.addr, "attracting cycle needs `modulus` and no `power`".into());
                    None
                }
                (CycleKindDto::Superattracting, _, _) => {
                    self.schema(c.addr, "superattracting cycle needs `power` and no `modulus`".into());
                    None
                }
            };
            if let Some(kind) = kind {
                cycles.push(AccumulationCycle {
                    points: c.value.points.iter().map(|p| PointId::new(p.as_str())).collect(),
                    kind,
                });
            }
        }

        let shield = dto.shield.as_ref().map(|s| {
            let disks = self.unique("disk", s.disks.iter().map(|d| (d.value.id.as_str(), d.addr)));
            for d in &s.disks {
                self.require_field(&ids, &d.value.center, d.addr, "center", "disk center");
                self.require_field(&ids, &d.value.anchor, d.addr, "anchor", "disk anchor");
            }
            self.unique("shield annulus", s.annuli.iter().map(|a| (a.value.id.as_str(), a.addr)));
            for a in &s.annuli {
                self.require_field(&disks, &a.value.attached_to, a.addr, "attached_to", "disk");
            }
            self.unique("disk image of", s.image.iter().map(|m| (m.value.from.as_str(), m.addr)));
            for m in &s.image {
                self.require_field(&disks, &m.value.from, m.addr, "from", "disk");
                self.require_field(&disks, &m.value.to, m.addr, "to", "disk");
            }
            ShieldedStructure {
                disks: s
                    .disks
                    .iter()
                    .map(|d| ShieldDisk {
                        id: DiskId::new(d.value.id.as_str()),
                        center: PointId::new(d.value.center.as_str()),
                        anchor: PointId::new(d.value.anchor.as_str()),
                    })
                    .collect(),
                annuli: s
                    .annuli
                    .iter()
                    .map(|a| ShieldAnnulus {
                        id: AnnulusId::new(a.value.id.as_str()),
                        attached_to: DiskId::new(a.value.attached_to.as_str()),
                    })
                    .collect(),
                image: s
                    .image
                    .iter()
                    .map(|m| (DiskId::new(m.value.from.as_str()), DiskId::new(m.value.to.as_str())))
                    .collect(),
            }
        });

        let spec = CoveringSpec {
            degree: dto.degree,
            points,
            cycles,
            shield,
            p_finite: dto.p_finite,
            complete: dto.complete,
        };
        (spec, ids)
    }

    /// Pullback entries keyed by curves in `key_curves` or points in
    /// `key_points`; components may name any curve in `curves` and point in
    /// `points`.
    fn entries(
        &mut self,
        dtos: &[Located<EntryDto>],
        key_curves: &Ids,
        curves: &Ids,
        key_points: &Ids,
        points: &Ids,
    ) -> BTreeMap<CurveClass, Vec<PreimageComponent>> {
        let keys: Vec<(String, usize)> = dtos
            .iter()
            .map(|e| {
                let prefix = match e.value.kind {
                    KeyKindDto::Curve => "curve",
                    KeyKindDto::Peripheral => "peripheral",
                };
                (format!("{prefix} {}", e.value.id), e.addr)
            })
            .collect();
        self.unique("pullback entry for", keys.iter().map(|(k, a)| (k.as_str(), *a)));

        let mut out = BTreeMap::new();
        for e in dtos {
            let key = match e.value.kind {
                KeyKindDto::Curve => {
                    self.require_field(key_curves, &e.value.id, e.addr, "id", "curve");
                    CurveClass::curve(e.value.id.as_str())
                }
                KeyKindDto::Peripheral => {
                    self.require_field(key_points, &e.value.id, e.addr, "id", "point");
                    CurveClass::peripheral(e.value.id.as_str())
                }
            };
            let mut components = Vec::new();
            for c in &e.value.components {
                let class = match (c.kind, &c.id) {
                    (ClassKindDto::Trivial, None) => CurveClass::Trivial,
                    (ClassKindDto::Curve, Some(id)) => {
                        self.require(curves, id, e.addr, "curve");
                        CurveClass::curve(id.as_str())
                    }
                    (ClassKindDto::Peripheral, Some(id)) => {
                        self.require(points, id, e.addr, "point");
                        CurveClass::peripheral(id.as_str())
                    }
                    (ClassKindDto::Trivial, Some(_)) => {
                        self.schema(e.addr, "a trivial component takes no `id`".into());
                        continue;
                    }
                    (_, None) => {
                        self.schema(e.addr, "curve and peripheral components need an `id`".into());
                        continue;
                    }
                };
                components.push(PreimageComponent::new(class, c.degree));
            }
            out.entry(key).or_insert(components);
        }
        out
    }

    fn standard_form(&mut self, dto: &StandardFormDto, points: &Ids) -> (StandardFormSpec, Ids) {
        let curves: Ids = dto.curves.iter().cloned().collect();
        let annuli0 = self.unique(
            "annulus",
            dto.annuli
                .iter()
                .map(|a| (a.value.id.as_str(), a.addr))
                .chain(dto.level1_annuli.iter().map(|a| (a.value.id.as_str(), a.addr))),
        );
        let level0: Ids = dto.annuli.iter().map(|a| a.value.id.clone()).collect();
        debug_assert!(level0.is_subset(&annuli0));
        for a in &dto.annuli {
            self.require_field(&curves, &a.value.core, a.addr, "core", "core curve");
        }
        for a in &dto.level1_annuli {
            self.require_field(&level0, &a.value.contained_in, a.addr, "contained_in", "annulus");
            self.require_field(&level0, &a.value.maps_to, a.addr, "maps_to", "annulus");
            self.require_field(&curves, &a.value.homotopic_to, a.addr, "homotopic_to", "curve");
        }
        self.unique(
            "piece",
            dto.pieces
                .iter()
                .map(|p| (p.value.id.as_str(), p.addr))
                .chain(dto.level1_pieces.iter().map(|p| (p.value.id.as_str(), p.addr))),
        );
        let pieces0: Ids = dto.pieces.iter().map(|p| p.value.id.clone()).collect();
        for p in &dto.pieces {
            for x in &p.value.marked {
                self.require(points, x, p.addr, "point");
            }
        }
        for p in &dto.level1_pieces {
            self.require_field(&pieces0, &p.value.contained_in, p.addr, "contained_in", "piece");
            self.require_field(&pieces0, &p.value.maps_to, p.addr, "maps_to", "piece");
            for x in &p.value.marked {
                self.require(points, x, p.addr, "point");
            }
        }

        let spec = StandardFormSpec {
            curves: dto.curves.iter().map(|c| CurveId::new(c.as_str())).collect(),
            annuli0: dto
                .annuli
                .iter()
                .map(|a| Annulus0 {
                    id: AnnulusId::new(a.value.id.as_str()),
                    core: CurveId::new(a.value.core.as_str()),
                    sides: a.value.sides.clone().map(BoundaryId::new),
                })
                .collect(),
            annuli1: dto
                .level1_annuli
                .iter()
                .map(|a| Annulus1 {
                    id: AnnulusId::new(a.value.id.as_str()),
                    contained_in: AnnulusId::new(a.value.contained_in.as_str()),
                    homotopic_to: CurveId::new(a.value.homotopic_to.as_str()),
                    maps_to: AnnulusId::new(a.value.maps_to.as_str()),
                    shares: a.value.shares,
                    degree: a.value.degree,
                })
                .collect(),
            pieces0: dto
                .pieces
                .iter()
                .map(|p| Piece {
                    id: PieceId::new(p.value.id.as_str()),
                    boundary: p.value.boundary.iter().map(|b| BoundaryId::new(b.as_str())).collect(),
                    marked: p.value.marked.iter().map(|x| PointId::new(x.as_str())).collect(),
                })
                .collect(),
            pieces1: dto
                .level1_pieces
                .iter()
                .map(|p| Level1Piece {
                    id: PieceId::new(p.value.id.as_str()),
                    maps_to: PieceId::new(p.value.maps_to.as_str()),
                    degree: p.value.degree,
                    contained_in: PieceId::new(p.value.contained_in.as_str()),
                    boundary: p
                        .value
                        .boundary
                        .iter()
                        .map(|b| {
                            let kind = match b.kind {
                                BoundaryKindDto::Inherited => BoundaryKind::Inherited,
                                BoundaryKindDto::Peripheral => BoundaryKind::Peripheral,
                            };
                            (BoundaryId::new(b.id.as_str()), kind)
                        })
                        .collect(),
                    marked: p.value.marked.iter().map(|x| PointId::new(x.as_str())).collect(),
                })
                .collect(),
        };
        (spec, pieces0)
    }

    fn periodic(
        &mut self,
        dto: &Located<PeriodicPieceDto>,
        pieces: Option<&Ids>,
        universe: Option<&Ids>,
        points: &Ids,
    ) -> PeriodicPieceData {
        let p = &dto.value;
        if let Some(pieces) = pieces {
            self.require(pieces, &p.piece, dto.addr, "piece");
        }
        let gammas = self.unique(
            "boundary curve",
            p.gamma.iter().map(|g| (g.value.curve.as_str(), g.addr)),
        );
        let index = |id: &str| p.gamma.iter().position(|g| g.value.curve == id);
        let mut gamma = Vec::new();
        for g in &p.gamma {
            if let Some(universe) = universe {
                self.require_field(universe, &g.value.curve, g.addr, "curve", "curve");
            }
            self.require_field(&gammas, &g.value.image, g.addr, "image", "boundary curve");
            gamma.push(GammaCurve {
                curve: CurveId::new(g.value.curve.as_str()),
                image: index(&g.value.image).unwrap_or(usize::MAX),
                degree: g.value.degree,
            });
        }

        let (interior, interior_points) = self.covering(&p.interior, "interior point", false);
        self.unique("β curve", p.beta.iter().map(|b| (b.value.id.as_str(), b.addr)));
        let mut beta = Vec::new();
        for b in &p.beta {
            self.require_field(&gammas, &b.value.target, b.addr, "target", "boundary curve");
            if let Some(z) = &b.value.z_star {
                self.require(&interior_points, z, b.addr, "interior point");
            }
            beta.push(BetaCurve {
                id: BoundaryId::new(b.value.id.as_str()),
                target: index(&b.value.target).unwrap_or(usize::MAX),
                degree: b.value.degree,
                z_star: b.value.z_star.as_deref().map(PointId::new),
            });
        }

        let interior_curves: Ids = p.interior_curves.iter().cloned().collect();
        if let Some(universe) = universe {
            for c in &p.interior_curves {
                self.require(universe, c, dto.addr, "curve");
            }
        }
        let all_points: Ids = points.union(&interior_points).cloned().collect();
        let component_curves = universe.cloned().unwrap_or_else(|| interior_curves.clone());
        let containment = self.entries(
            &p.containment,
            &interior_curves,
            &component_curves,
            &interior_points,
            &all_points,
        );

        PeriodicPieceData {
            piece: PieceId::new(p.piece.as_str()),
            period: p.period,
            degree: p.degree,
            gamma,
            beta,
            interior,
            interior_curves: p.interior_curves.iter().map(|c| CurveId::new(c.as_str())).collect(),
            containment,
        }
    }
}

fn covering_dto(spec: &CoveringSpec) -> CoveringDto {
    CoveringDto {
        degree: spec.degree,
        p_finite: spec.p_finite,
        complete: spec.complete,
        points: spec
            .points
            .iter()
            .map(|p| {
                Located::detached(PointDto {
                    id: p.id.to_string(),
                    image: p.image.to_string(),
                    local_degree: p.local_degree,
                    role: match p.role {
                        PointRole::Postcritical => RoleDto::Postcritical,
                        PointRole::ExtraMarked => RoleDto::Extra,
                        PointRole::DiskCenter => RoleDto::DiskCenter,
                    },
                })
            })
            .collect(),
        cycles: spec
            .cycles
            .iter()
            .map(|c| {
                let (kind, modulus, power) = match &c.kind {
                    CycleKind::Attracting { modulus } => (CycleKindDto::Attracting, Some(modulus.to_string()), None),
                    CycleKind::Superattracting { power } => (CycleKindDto::Superattracting, None, Some(*power)),
                };
                Located::detached(CycleDto {
                    points: c.points.iter().map(ToString::to_string).collect(),
                    kind,
                    modulus,
                    power,
                })
            })
            .collect(),
        shield: spec.shield.as_ref().map(|s| ShieldDto {
            disks: s
                .disks
                .iter()
                .map(|d| {
                    Located::detached(DiskDto {
                        id: d.id.to_string(),
                        center: d.center.to_string(),
                        anchor: d.anchor.to_string(),
                    })
                })
                .collect(),
            annuli: s
                .annuli
                .iter()
                .map(|a| {
                    Located::detached(ShieldAnnulusDto {
                        id: a.id.to_string(),
                        attached_to: a.attached_to.to_string(),
                    })
                })
                .collect(),
            image: s
                .image
                .iter()
                .map(|(from, to)| {
                    Located::detached(DiskImageDto {
                        from: from.to_string(),
                        to: to.to_string(),
                    })
                })
                .collect(),
        }),
    }
}

fn entry_dtos(entries: &BTreeMap<CurveClass, Vec<PreimageComponent>>) -> Vec<Located<EntryDto>> {
    entries
        .iter()
        .filter_map(|(key, comps)| {
            let (kind, id) = match key {
                CurveClass::Curve(c) => (KeyKindDto::Curve, c.to_string()),
                CurveClass::Peripheral(p) => (KeyKindDto::Peripheral, p.to_string()),
                CurveClass::Trivial => return None,
            };
            let components = comps
                .iter()
                .map(|c| {
                    let (kind, id) = match &c.class {
                        CurveClass::Curve(x) => (ClassKindDto::Curve, Some(x.to_string())),
                        CurveClass::Peripheral(x) => (ClassKindDto::Peripheral, Some(x.to_string())),
                        CurveClass::Trivial => (ClassKindDto::Trivial, None),
                    };
                    ComponentDto {
                        kind,
                        id,
                        degree: c.degree,
                    }
                })
                .collect();
            Some(Located::detached(EntryDto { kind, id, components }))
        })
        .collect()
}

fn curve_name(gamma: &[GammaCurve], i: usize) -> String {
    gamma.get(i).map_or_else(|| format!("#{i}"), |g| g.curve.to_string())
}

pub fn to_dto(doc: &Document) -> DocumentDto {
    DocumentDto {
        format_version: FORMAT_VERSION,
        name: doc.name.clone(),
        description: doc.description.clone(),
        covering: covering_dto(&doc.covering),
        curves: doc.has_curves().then(|| CurvesDto {
            universe: doc
                .table
                .universe
                .iter()
                .map(|c| Located::detached(c.to_string()))
                .collect(),
            pullback: entry_dtos(&doc.table.entries),
        }),
        multicurves: doc
            .multicurves
            .iter()
            .map(|m| {
                Located::detached(MulticurveDto {
                    name: m.name.clone(),
                    curves: m.curves.curves().iter().map(ToString::to_string).collect(),
                })
            })
            .collect(),
        standard_form: doc.standard_form.as_ref().map(|sf| StandardFormDto {
            curves: sf.curves.iter().map(ToString::to_string).collect(),
            annuli: sf
                .annuli0
                .iter()
                .map(|a| {
                    Located::detached(Annulus0Dto {
                        id: a.id.to_string(),
                        core: a.core.to_string(),
                        sides: a.sides.clone().map(|s| s.to_string()),
                    })
                })
                .collect(),
            level1_annuli: sf
                .annuli1
                .iter()
                .map(|a| {
                    Located::detached(Annulus1Dto {
                        id: a.id.to_string(),
                        contained_in: a.contained_in.to_string(),
                        homotopic_to: a.homotopic_to.to_string(),
                        maps_to: a.maps_to.to_string(),
                        shares: a.shares,
                        degree: a.degree,
                    })
                })
                .collect(),
            pieces: sf
                .pieces0
                .iter()
                .map(|p| {
                    Located::detached(PieceDto {
                        id: p.id.to_string(),
                        boundary: p.boundary.iter().map(ToString::to_string).collect(),
                        marked: p.marked.iter().map(ToString::to_string).collect(),
                    })
                })
                .collect(),
            level1_pieces: sf
                .pieces1
                .iter()
                .map(|p| {
                    Located::detached(Level1PieceDto {
                        id: p.id.to_string(),
                        contained_in: p.contained_in.to_string(),
                        maps_to: p.maps_to.to_string(),
                        degree: p.degree,
                        boundary: p
                            .boundary
                            .iter()
                            .map(|(id, kind)| BoundaryDto {
                                id: id.to_string(),
                                kind: match kind {
                                    BoundaryKind::Inherited => BoundaryKindDto::Inherited,
                                    BoundaryKind::Peripheral => BoundaryKindDto::Peripheral,
                                },
                            })
                            .collect(),
                        marked: p.marked.iter().map(ToString::to_string).collect(),
                    })
                })
                .collect(),
        }),
        periodic_pieces: doc
            .periodic_pieces
            .iter()
            .map(|p| {
                Located::detached(PeriodicPieceDto {
                    piece: p.piece.to_string(),
                    period: p.period,
                    degree: p.degree,
                    gamma: p
                        .gamma
                        .iter()
                        .map(|g| {
                            Located::detached(GammaDto {
                                curve: g.curve.to_string(),
                                image: curve_name(&p.gamma, g.image),
                                degree: g.degree,
                            })
                        })
                        .collect(),
                    beta: p
                        .beta
                        .iter()
                        .map(|b| {
                            Located::detached(BetaDto {
                                id: b.id.to_string(),
                                target: curve_name(&p.gamma, b.target),
                                degree: b.degree,
                                z_star: b.z_star.as_ref().map(ToString::to_string),
                            })
                        })
                        .collect(),
                    interior: covering_dto(&p.interior),
                    interior_curves: p.interior_curves.iter().map(ToString::to_string).collect(),
                    containment: entry_dtos(&p.containment),
                })
            })
            .collect(),
        traces: doc.traces.as_ref().map(|t| {
            Located::detached(TraceDto {
                curves: t.curves.iter().map(ToString::to_string).collect(),
                samples: t.samples.clone(),
            })
        }),
    }
}

/// Canonical pretty-printed JSON; parsing it back gives an equal document.
pub fn emit(doc: &Document) -> String {
    let mut out = serde_json::to_string_pretty(&to_dto(doc)).expect("documents always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "format_version": 1,
  "covering": {
    "degree": 2,
    "points": [
      {"id": "a", "image": "b", "local_degree": 2},
      {"id": "b", "image": "a", "local_degree": 2}
    ]
  }
}"#;

    fn errors(text: &str) -> Vec<InputError> {
        parse(text, false).unwrap_err()
    }

    #[test]
    fn minimal_document_round_trips() {
        let doc = parse(MINIMAL, false).unwrap().document;
        assert_eq!(doc.covering.points.len(), 2);
        assert!(!doc.has_curves());
        let text = emit(&doc);
        let again = parse(&text, false).unwrap().document;
        assert_eq!(again, doc);
        assert_eq!(emit(&again), text);
    }

    #[test]
    fn syntax_errors_carry_a_position() {
        let e = errors("{\n  \"format_version\": 1,\n  oops\n}");
        assert_eq!(e[0].kind, InputErrorKind::Syntax);
        assert_eq!(e[0].locations[0].line, 3);
    }

    #[test]
    fn type_errors_point_into_the_record() {
        let text = MINIMAL.replace(r#""local_degree": 2}"#, r#""local_degree": "two"}"#);
        let e = errors(&text);
        assert_eq!(e[0].kind, InputErrorKind::Schema);
        assert_eq!(e[0].locations[0].line, 6);
    }

    #[test]
    fn duplicates_report_both_declarations() {
        let text = MINIMAL.replace(r#""id": "b""#, r#""id": "a""#);
        let e = errors(&text);
        let dup = e.iter().find(|e| e.kind == InputErrorKind::DuplicateId).unwrap();
        assert_eq!(dup.locations.iter().map(|l| l.line).collect::<Vec<_>>(), [7, 6]);
        assert!(dup.to_string().contains("first declared at 6:"));
    }

    #[test]
    fn dangling_images_are_located() {
        let text = MINIMAL.replace(r#""image": "a""#, r#""image": "nowhere""#);
        let e = errors(&text);
        assert_eq!(e.len(), 1);
        assert_eq!(e[0].kind, InputErrorKind::DanglingReference);
        assert_eq!(e[0].locations[0].line, 7);
    }

    #[test]
    fn unknown_keys_are_errors_unless_lenient() {
        let text = MINIMAL
            .replace(r#""local_degree": 2}"#, r#""local_degree": 2, "colour": "red"}"#)
            .replace("\"format_version\": 1,", "\"format_version\": 1, \"extra\": 0,");
        let e = errors(&text);
        assert_eq!(e.len(), 3);
        assert!(e.iter().all(|e| e.kind == InputErrorKind::UnknownKey));
        assert_eq!(e[0].locations[0], Location { line: 2, column: 24 });
        let parsed = parse(&text, true).unwrap();
        assert_eq!(parsed.warnings.len(), 3);
    }

    #[test]
    fn unsupported_versions_are_rejected() {
        let e = errors(&MINIMAL.replace("\"format_version\": 1", "\"format_version\": 2"));
        assert_eq!(e[0].kind, InputErrorKind::Schema);
        assert_eq!(e[0].locations[0].line, 2);
    }
}
