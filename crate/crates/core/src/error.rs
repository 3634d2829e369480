use alloc::string::String;

use crate::{CurveId, PieceId, PointId, ValidationReport};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("portrait incomplete: {from} maps to undeclared point {to}")]
    PortraitIncomplete { from: PointId, to: PointId },

    #[error("not semi-rational: {0}")]
    NotSemiRational(String),

    #[error("unknown curve {0}")]
    UnknownCurve(CurveId),

    #[error("invalid multicurve: {0}")]
    InvalidMulticurve(String),

    #[error("peripheral pullback undeclared for marked point {0}")]
    PeripheralPullbackUndeclared(PointId),

    #[error("curve universe has {size} curves, above the search cap of {cap} (raise the universe cap)")]
    UniverseTooLarge { size: usize, cap: usize },

    #[error("standard form violated at piece {piece}: {reason}")]
    StandardFormViolated { piece: PieceId, reason: String },

    #[error("containment flags inconsistent: {0}")]
    ContainmentFlags(String),

    #[error("invalid input:\n{0}")]
    Invalid(ValidationReport),

    #[error("malformed length trace: {0}")]
    Trace(String),

    #[error("{formula}: argument outside domain ({reason})")]
    Domain { formula: &'static str, reason: String },
}
