//! Document format, reports and command-line front end for `spherecover-core`.

pub mod cli;
pub mod commands;
pub mod document;
pub mod dto;
pub mod num;
pub mod report;
pub mod source;

pub use cli::{run, Outcome};
pub use document::{emit, parse, Document, InputError, InputErrorKind, Parsed};
