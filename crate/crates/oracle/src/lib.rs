//! Reference computations for tests.
//!
//! Nothing here shares code with `spherecover-core`: the spectral oracle
//! interpolates determinants and isolates roots with Descartes' rule, the
//! numeric oracle is decimal fixed point with its own series, and the
//! quadrature is plain adaptive Simpson in `f64`.

pub mod dec;
pub mod formulas;
pub mod quad;
pub mod spectral;

pub type Q = num_rational::BigRational;
