use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// The invariant a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    DuplicateId,
    DanglingReference,
    Degree,
    RiemannHurwitz,
    Cycle,
    Shield,
    DegreeSum,
    Multicurve,
    CoreCurve,
    Containment,
    BoundarySharing,
    BoundaryDegree,
    PieceBoundary,
    EulerCount,
    Bookkeeping,
    TargetDegree,
    Index,
    LengthFloor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub message: String,
    /// Exact signed residual (observed minus expected) for arithmetic identities.
    pub residual: Option<i64>,
}

/// Outcome of a validation pass. Validation never aborts; an empty report means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, rule: Rule, message: impl Into<String>) {
        self.violations.push(Violation {
            rule,
            message: message.into(),
            residual: None,
        });
    }

    pub fn push_residual(&mut self, rule: Rule, message: impl Into<String>, residual: i64) {
        self.violations.push(Violation {
            rule,
            message: message.into(),
            residual: Some(residual),
        });
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// `Ok(())` when valid, otherwise the report wrapped as [`crate::Error::Invalid`].
    pub fn into_result(self) -> crate::Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(crate::Error::Invalid(self))
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}] {}", self.rule, self.message)?;
        if let Some(r) = self.residual {
            write!(f, " (residual {r})")?;
        }
        Ok(())
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}
