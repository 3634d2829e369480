//! Combinatorial core for branched self-coverings of the marked 2-sphere.
//!
//! The crate works entirely on finite, exact data: critical portraits,
//! curve pullback tables, Thurston matrices over the rationals, standard-form
//! thick/thin decompositions and the disk-capping extension of a periodic
//! thick piece. The hyperbolic-geometry bounds in [`estimates`] are evaluated
//! with a fixed-point real type carrying roughly 96 significant digits.
//!
//! Everything here is `no_std` (with `alloc`); document parsing, reports and
//! the command line live in the companion `spherecover` crate.

#![no_std]

extern crate alloc;

pub mod curves;
pub mod decomposition;
pub mod error;
pub mod estimates;
pub mod extension;
mod ids;
pub mod linalg;
pub mod model;
pub mod real;
pub mod report;
pub mod thurston;

pub use error::{Error, Result};
pub use ids::{AnnulusId, BoundaryId, CurveId, DiskId, PieceId, PointId};
pub use report::{Rule, ValidationReport, Violation};

/// Exact rational used for matrix entries, multipliers and Euler characteristics.
pub type Rational = num_rational::BigRational;
