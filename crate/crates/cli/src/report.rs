//! Command reports, rendered as JSON or plain text.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use spherecover_core::real::format_significant;
use spherecover_core::{Rational, Rule, ValidationReport};

use crate::document::InputError;

pub const REPORT_VERSION: u32 = 1;

/// Overall result; the process exit code is derived from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    /// A negative mathematical answer: an obstruction, a non-hyperbolic
    /// orbifold, a non-realizable piece.
    Negative,
    /// The input is malformed, inconsistent or lacks a needed section.
    Invalid,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Invalid => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Negative => "negative",
            Status::Invalid => "invalid",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub rule: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub location: Option<String>,
}

/// `RiemannHurwitz` becomes `riemann-hurwitz`.
pub fn rule_name(rule: Rule) -> String {
    let mut out = String::new();
    for (i, ch) in format!("{rule:?}").chars().enumerate() {
        if ch.is_ascii_uppercase() {
            if i > 0 {
                out.push('-');
            }
            out.push(ch.to_ascii_lowercase());
        } else {
            out.push(ch);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
    pub status: Status,
    pub verdicts: Map<String, Value>,
    pub diagnostics: Vec<Diagnostic>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(command: &str, document: Option<String>) -> Self {
        Self {
            format_version: REPORT_VERSION,
            command: command.to_string(),
            document,
            status: Status::Ok,
            verdicts: Map::new(),
            diagnostics: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn verdict(&mut self, key: &str, value: impl Into<Value>) {
        self.verdicts.insert(key.to_string(), value.into());
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Escalates the status; `Invalid` outranks `Negative`.
    pub fn set_status(&mut self, status: Status) {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::Negative => 1,
            Status::Invalid => 2,
        };
        if rank(status) > rank(self.status) {
            self.status = status;
        }
    }

    pub fn error(&mut self, rule: &str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            severity: Severity::Error,
            rule: rule.to_string(),
            message: message.into(),
            residual: None,
            location: None,
        });
        self.set_status(Status::Invalid);
    }

    pub fn warning(&mut self, rule: &str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            severity: Severity::Warning,
            rule: rule.to_string(),
            message: message.into(),
            residual: None,
            location: None,
        });
    }

    /// Adds every violation as an error diagnostic; returns whether there were none.
    pub fn absorb(&mut self, validation: &ValidationReport) -> bool {
        for v in &validation.violations {
            self.diagnostics.push(Diagnostic {
                severity: Severity::Error,
                rule: rule_name(v.rule),
                message: v.message.clone(),
                residual: v.residual,
                location: None,
            });
        }
        if !validation.is_valid() {
            self.set_status(Status::Invalid);
        }
        validation.is_valid()
    }

    pub fn input_error(&mut self, e: &InputError, severity: Severity) {
        self.diagnostics.push(Diagnostic {
            severity,
            rule: e.kind.as_str().to_string(),
            message: match e.locations.get(1) {
                Some(first) => format!("{} (first declared at {first})", e.message),
                None => e.message.clone(),
            },
            residual: None,
            location: e.locations.first().map(ToString::to_string),
        });
        if severity == Severity::Error {
            self.set_status(Status::Invalid);
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        if let Some(d) = &self.document {
            let _ = writeln!(s, "document: {d}");
        }
        let _ = writeln!(s, "status: {}", self.status.as_str());
        for (k, v) in &self.verdicts {
            write_value(&mut s, k, v, 0);
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(s, "diagnostics:");
            for d in &self.diagnostics {
                let sev = match d.severity {
                    Severity::Error => "error",
                    Severity::Warning => "warning",
                };
                let _ = write!(s, "  {sev} [{}]", d.rule);
                if let Some(at) = &d.location {
                    let _ = write!(s, " {at}");
                }
                let _ = write!(s, ": {}", d.message);
                if let Some(r) = d.residual {
                    let _ = write!(s, " (residual {r})");
                }
                s.push('\n');
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "notes:");
            for n in &self.notes {
                let _ = writeln!(s, "  - {n}");
            }
        }
        s
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Null => Some("-".into()),
        Value::Bool(_) | Value::Number(_) => Some(v.to_string()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => Some(format!(
            "[{}]",
            items.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn write_value(s: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(text) = scalar(v) {
        let _ = writeln!(s, "{pad}{key}: {text}");
        return;
    }
    let _ = writeln!(s, "{pad}{key}:");
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                write_value(s, k, v, depth + 1);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                write_value(s, &format!("[{i}]"), item, depth + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

/// Exact value with a decimal approximation alongside.
pub fn rational_value(r: &Rational) -> Value {
    let mut m = Map::new();
    m.insert("exact".into(), r.to_string().into());
    m.insert("approx".into(), format_significant(r, 12).into());
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_names_are_kebab_case() {
        assert_eq!(rule_name(Rule::RiemannHurwitz), "riemann-hurwitz");
        assert_eq!(rule_name(Rule::Degree), "degree");
    }

    #[test]
    fn status_only_escalates() {
        let mut r = Report::new("x", None);
        r.set_status(Status::Invalid);
        r.set_status(Status::Negative);
        assert_eq!(r.status.exit_code(), 2);
    }

    #[test]
    fn text_rendering_nests() {
        let mut r = Report::new("thurston", Some("levy".into()));
        r.verdict("stable", true);
        r.verdict("matrix", serde_json::json!([["1", "0"], ["0", "1/2"]]));
        r.error("degree", "bad");
        let text = r.to_text();
        assert!(text.contains("stable: true\n"));
        assert!(text.contains("  [0]: [1, 0]\n"));
        assert!(text.contains("error [degree]: bad"));
        assert!(text.contains("status: invalid"));
    }
}
