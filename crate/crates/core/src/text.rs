//! The `key = value` text format shared by SLC sidecar headers, scene files,
//! pipeline configs and manifests.
//!
//! ```text
//! # comment
//! top_level = 1
//! [target]
//! range_m = 12.5
//! [target]
//! range_m = 40
//! ```
//!
//! Keys before the first `[section]` belong to an unnamed root section.
//! Sections may repeat; their order is preserved.

use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    /// `None` for the root section.
    pub name: Option<String>,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.get(key).map(|e| e.value.as_str())
    }

    /// Parses an optional value.
    pub fn parse_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                Error::parse(e.line, format!("cannot parse value {:?} for key {key}", e.value))
            }),
        }
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse_opt(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parse_opt(key)?.ok_or_else(|| {
            let where_ = match &self.name {
                Some(n) => format!("section [{n}]"),
                None => "root section".to_string(),
            };
            Error::parse(self.line, format!("missing key {key} in {where_}"))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(input: &str) -> Result<Self> {
        let mut sections = vec![Section {
            name: None,
            line: 1,
            entries: Vec::new(),
        }];
        for (idx, raw) in input.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            if let Some(rest) = text.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::parse(line, "unterminated section header"))?
                    .trim();
                if name.is_empty() || !name.chars().all(is_key_char) {
                    return Err(Error::parse(line, format!("bad section name {name:?}")));
                }
                sections.push(Section {
                    name: Some(name.to_string()),
                    line,
                    entries: Vec::new(),
                });
                continue;
            }
            let (key, value) = text
                .split_once('=')
                .ok_or_else(|| Error::parse(line, "expected key = value"))?;
            let key = key.trim();
            if key.is_empty() || !key.chars().all(is_key_char) {
                return Err(Error::parse(line, format!("bad key {key:?}")));
            }
            let section = sections.last_mut().expect("root section always present");
            section.entries.push(Entry {
                key: key.to_string(),
                value: value.trim().to_string(),
                line,
            });
        }
        Ok(Self { sections })
    }

    pub fn root(&self) -> &Section {
        &self.sections[0]
    }

    pub fn sections_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a Section> + 'a {
        self.sections
            .iter()
            .filter(move |s| s.name.as_deref() == Some(name))
    }

    /// The last section with this name, if any.
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().rev().find(|s| s.name.as_deref() == Some(name))
    }

    /// Rejects any named section not in `allowed`.
    pub fn expect_sections(&self, allowed: &[&str]) -> Result<()> {
        for s in &self.sections[1..] {
            let name = s.name.as_deref().unwrap_or_default();
            if !allowed.contains(&name) {
                return Err(Error::parse(s.line, format!("unknown section [{name}]")));
            }
        }
        Ok(())
    }
}

fn is_key_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-')
}

/// Builds a document in the same format; keys are written in insertion order.
#[derive(Debug, Default, Clone)]
pub struct Writer {
    out: String,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: &str) -> &mut Self {
        if !self.out.is_empty() {
            self.out.push('\n');
        }
        let _ = writeln!(self.out, "[{name}]");
        self
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.out, "{key} = {value}");
        self
    }

    pub fn finish(&self) -> String {
        self.out.clone()
    }
}
