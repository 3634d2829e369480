//! Source positions for JSON input.
//!
//! Records that carry ids are deserialized as [`Located`], which borrows the
//! record's raw text from the input and remembers where it starts. Each
//! located record is parsed on its own, so unknown keys and type errors
//! inside it are reported against its own position.

use std::cell::RefCell;
use std::fmt;

use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// The input text, for turning addresses inside it into line/column.
#[derive(Clone, Copy)]
pub struct Source<'a> {
    pub text: &'a str,
}

impl<'a> Source<'a> {
    pub fn new(text: &'a str) -> Self {
        Self { text }
    }

    /// Location of a byte offset, 1-based, columns counted in characters.
    pub fn at_offset(&self, offset: usize) -> Location {
        let offset = offset.min(self.text.len());
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let start = before.rfind('\n').map_or(0, |i| i + 1);
        Location {
            line,
            column: before[start..].chars().count() + 1,
        }
    }

    /// Location of an address obtained from a slice of this text.
    pub fn at_addr(&self, addr: usize) -> Location {
        self.at_offset(addr.saturating_sub(self.text.as_ptr() as usize))
    }

    /// Byte offset of a 1-based serde_json (line, column) pair within `text`.
    pub fn offset_of(text: &str, line: usize, column: usize) -> usize {
        let mut offset = 0;
        for (i, l) in text.split_inclusive('\n').enumerate() {
            if i + 1 == line {
                return offset + column.saturating_sub(1).min(l.len());
            }
            offset += l.len();
        }
        text.len()
    }

    /// Position of `"key"` used as an object key inside the record at `addr`.
    pub fn key_in_record(&self, addr: usize, key: &str) -> Option<Location> {
        let start = addr.checked_sub(self.text.as_ptr() as usize)?;
        let needle = format!("\"{key}\"");
        let rest = self.text.get(start..)?;
        let mut from = 0;
        while let Some(i) = rest[from..].find(&needle) {
            let at = from + i;
            let after = rest[at + needle.len()..].trim_start();
            if after.starts_with(':') {
                return Some(self.at_offset(start + at));
            }
            from = at + needle.len();
        }
        None
    }
}

#[derive(Default)]
struct Collector {
    /// (record address, path inside the record)
    unknown: Vec<(usize, String)>,
    /// Innermost failing record: (absolute address, message).
    error: Option<(usize, String)>,
}

thread_local! {
    static COLLECTOR: RefCell<Collector> = RefCell::new(Collector::default());
}

pub(crate) fn reset_collector() {
    COLLECTOR.with(|c| *c.borrow_mut() = Collector::default());
}

type AddrMessage = (usize, String);

pub(crate) fn take_collector() -> (Vec<AddrMessage>, Option<AddrMessage>) {
    COLLECTOR.with(|c| {
        let c = std::mem::take(&mut *c.borrow_mut());
        (c.unknown, c.error)
    })
}

/// serde_json messages end with " at line L column C"; the position is
/// reported separately.
pub(crate) fn bare_message(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// A value together with the address of its first byte in the input.
#[derive(Clone, Debug)]
pub struct Located<T> {
    pub addr: usize,
    pub value: T,
}

impl<T> Located<T> {
    /// For values built in memory; they have no source position.
    pub fn detached(value: T) -> Self {
        Self { addr: 0, value }
    }
}

impl<'de, T: DeserializeOwned> Deserialize<'de> for Located<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: &'de RawValue = Deserialize::deserialize(d)?;
        let text = raw.get();
        let addr = text.as_ptr() as usize;
        let mut de = serde_json::Deserializer::from_str(text);
        let mut unknown = Vec::new();
        let parsed = serde_ignored::deserialize(&mut de, |path| unknown.push(path.to_string()));
        COLLECTOR.with(|c| {
            let mut c = c.borrow_mut();
            match &parsed {
                Ok(_) => c.unknown.extend(unknown.into_iter().map(|p| (addr, p))),
                Err(e) => {
                    if c.error.is_none() {
                        let at = addr + Source::offset_of(text, e.line(), e.column());
                        c.error = Some((at, bare_message(e)));
                    }
                }
            }
        });
        match parsed {
            Ok(value) => Ok(Located { addr, value }),
            Err(e) => Err(D::Error::custom(bare_message(&e))),
        }
    }
}

impl<T: Serialize> Serialize for Located<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.value.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_to_locations() {
        let text = "ab\ncdé\nf";
        let s = Source::new(text);
        assert_eq!(s.at_offset(0), Location { line: 1, column: 1 });
        assert_eq!(s.at_offset(4), Location { line: 2, column: 2 });
        assert_eq!(s.at_offset(text.len()), Location { line: 3, column: 2 });
        assert_eq!(Source::offset_of(text, 2, 2), 4);
    }

    #[test]
    fn keys_are_found_inside_records() {
        let text = r#"{"a": {"id": "x", "b": "id"}}"#;
        let s = Source::new(text);
        let rec = text.as_ptr() as usize + 6;
        assert_eq!(s.key_in_record(rec, "b"), Some(Location { line: 1, column: 19 }));
        assert_eq!(s.key_in_record(rec, "missing"), None);
    }
}
