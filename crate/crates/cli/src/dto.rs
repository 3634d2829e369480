//! Serde mirror of the document format. Field names here are the format.

use serde::{Deserialize, Serialize};

use crate::source::Located;

fn yes() -> bool {
    true
}

fn is_true(b: &bool) -> bool {
    *b
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DocumentDto {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub covering: CoveringDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curves: Option<CurvesDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub multicurves: Vec<Located<MulticurveDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard_form: Option<StandardFormDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub periodic_pieces: Vec<Located<PeriodicPieceDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<Located<TraceDto>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringDto {
    pub degree: u32,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub p_finite: bool,
    #[serde(default = "yes", skip_serializing_if = "is_true")]
    pub complete: bool,
    pub points: Vec<Located<PointDto>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cycles: Vec<Located<CycleDto>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shield: Option<ShieldDto>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RoleDto {
    #[default]
    Postcritical,
    Extra,
    DiskCenter,
}

impl RoleDto {
    fn is_default(&self) -> bool {
        *self == RoleDto::Postcritical
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointDto {
    pub id: String,
    pub image: String,
    pub local_degree: u32,
    #[serde(default, skip_serializing_if = "RoleDto::is_default")]
    pub role: RoleDto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleKindDto {
    Attracting,
    Superattracting,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleDto {
    pub points: Vec<String>,
    pub kind: CycleKindDto,
    /// `|λ|` as `"p/q"`, for attracting cycles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShieldDto {
    pub disks: Vec<Located<DiskDto>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annuli: Vec<Located<ShieldAnnulusDto>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub image: Vec<Located<DiskImageDto>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskDto {
    pub id: String,
    pub center: String,
    pub anchor: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShieldAnnulusDto {
    pub id: String,
    pub attached_to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiskImageDto {
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvesDto {
    pub universe: Vec<Located<String>>,
    #[serde(default)]
    pub pullback: Vec<Located<EntryDto>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyKindDto {
    Curve,
    Peripheral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKindDto {
    Curve,
    Peripheral,
    Trivial,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryDto {
    pub kind: KeyKindDto,
    pub id: String,
    pub components: Vec<ComponentDto>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComponentDto {
    pub kind: ClassKindDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub degree: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MulticurveDto {
    pub name: String,
    pub curves: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StandardFormDto {
    pub curves: Vec<String>,
    pub annuli: Vec<Located<Annulus0Dto>>,
    #[serde(default)]
    pub level1_annuli: Vec<Located<Annulus1Dto>>,
    pub pieces: Vec<Located<PieceDto>>,
    #[serde(default)]
    pub level1_pieces: Vec<Located<Level1PieceDto>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Annulus0Dto {
    pub id: String,
    pub core: String,
    pub sides: [String; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Annulus1Dto {
    pub id: String,
    pub contained_in: String,
    pub homotopic_to: String,
    pub maps_to: String,
    pub shares: [bool; 2],
    pub degree: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceDto {
    pub id: String,
    pub boundary: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marked: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryKindDto {
    Inherited,
    Peripheral,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryDto {
    pub id: String,
    pub kind: BoundaryKindDto,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Level1PieceDto {
    pub id: String,
    pub contained_in: String,
    pub maps_to: String,
    pub degree: u32,
    pub boundary: Vec<BoundaryDto>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub marked: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeriodicPieceDto {
    pub piece: String,
    pub period: u32,
    pub degree: u32,
    pub gamma: Vec<Located<GammaDto>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub beta: Vec<Located<BetaDto>>,
    pub interior: CoveringDto,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interior_curves: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub containment: Vec<Located<EntryDto>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaDto {
    pub curve: String,
    /// Curve id of the image, one of the piece's γ curves.
    pub image: String,
    pub degree: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BetaDto {
    pub id: String,
    /// Curve id of the γ it covers.
    pub target: String,
    pub degree: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_star: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceDto {
    pub curves: Vec<String>,
    pub samples: Vec<Vec<f64>>,
}
