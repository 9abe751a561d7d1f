//! Centralized bibliography.
//!
//! Reads a strict subset of the BibTeX format: `@kind{key, name={value}, ...}`
//! with brace-delimited (or bare numeric) values. `@string`, concatenation and
//! cross-references are not supported. Lines starting with `%` between entries
//! are comments.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibEntry {
    pub key: String,
    pub kind: String,
    pub fields: BTreeMap<String, String>,
}

impl BibEntry {
    pub fn field(&self, name: &str) -> Option<&str> {
        self.fields.get(name).map(String::as_str)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BibMap {
    entries: BTreeMap<String, BibEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BibError {
    #[error("citation key {0} is defined twice")]
    DuplicateKey(String),
    #[error("malformed bibliography entry at line {line}: {detail}")]
    MalformedEntry { line: usize, detail: String },
    #[error("citation {0} does not resolve")]
    DanglingCitation(String),
}

impl BibMap {
    pub fn insert(&mut self, entry: BibEntry) -> Result<(), BibError> {
        if self.entries.contains_key(&entry.key) {
            return Err(BibError::DuplicateKey(entry.key));
        }
        self.entries.insert(entry.key.clone(), entry);
        Ok(())
    }

    pub fn resolve(&self, key: &str) -> Result<&BibEntry, BibError> {
        self.entries
            .get(key)
            .ok_or_else(|| BibError::DanglingCitation(key.to_string()))
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BibEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes the map back in the accepted subset, sorted by key.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in self.entries.values() {
            out.push_str(&format!("@{}{{{}", entry.kind, entry.key));
            for (name, value) in &entry.fields {
                out.push_str(&format!(",\n  {name} = {{{value}}}"));
            }
            out.push_str("\n}\n\n");
        }
        out
    }
}

pub fn parse_bib(text: &str) -> Result<BibMap, BibError> {
    let mut map = BibMap::default();
    let mut cur = Cursor::new(text);
    loop {
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some('%') => cur.skip_line(),
            Some('@') => {
                let entry = cur.entry()?;
                map.insert(entry)?;
            }
            Some(c) => return Err(cur.error(format!("unexpected {c:?} between entries"))),
        }
    }
    Ok(map)
}

/// "author. title. publisher, year." with absent fields and their
/// separators dropped.
pub fn format_citation(entry: &BibEntry) -> String {
    let clean = |name: &str| {
        entry
            .field(name)
            .map(|v| v.replace(['{', '}'], "").trim().trim_end_matches('.').to_string())
            .filter(|v| !v.is_empty())
    };
    let imprint: Vec<String> = [clean("publisher"), clean("year")].into_iter().flatten().collect();
    let parts: Vec<String> = [clean("author"), clean("title")]
        .into_iter()
        .flatten()
        .chain((!imprint.is_empty()).then(|| imprint.join(", ")))
        .collect();
    if parts.is_empty() {
        return String::new();
    }
    format!("{}.", parts.join(". "))
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor {
            chars: text.chars().peekable(),
            line: 1,
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next();
        if c == Some('\n') {
            self.line += 1;
        }
        c
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn skip_line(&mut self) {
        while let Some(c) = self.bump() {
            if c == '\n' {
                break;
            }
        }
    }

    fn error(&self, detail: impl Into<String>) -> BibError {
        BibError::MalformedEntry {
            line: self.line,
            detail: detail.into(),
        }
    }

    fn expect(&mut self, want: char) -> Result<(), BibError> {
        self.skip_ws();
        match self.bump() {
            Some(c) if c == want => Ok(()),
            Some(c) => Err(self.error(format!("expected {want:?}, found {c:?}"))),
            None => Err(self.error(format!("expected {want:?}, found end of input"))),
        }
    }

    fn word(&mut self) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek() {
            if !(c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | ':' | '.')) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn entry(&mut self) -> Result<BibEntry, BibError> {
        let start = self.line;
        self.bump(); // '@'
        let kind = self.word().to_ascii_lowercase();
        if kind.is_empty() || !kind.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(self.error("missing entry kind"));
        }
        self.expect('{')?;
        self.skip_ws();
        let key = self.word();
        if key.is_empty() {
            return Err(self.error("missing citation key"));
        }
        let mut fields = BTreeMap::new();
        loop {
            self.skip_ws();
            match self.bump() {
                Some('}') => break,
                Some(',') => {}
                _ => return Err(self.error("expected ',' or '}'")),
            }
            self.skip_ws();
            if self.peek() == Some('}') {
                self.bump();
                break;
            }
            let name = self.word().to_ascii_lowercase();
            if name.is_empty() {
                return Err(self.error("missing field name"));
            }
            self.expect('=')?;
            self.skip_ws();
            let value = self.value()?;
            if fields.insert(name.clone(), value).is_some() {
                return Err(self.error(format!("field {name} repeated")));
            }
        }
        if let Some(year) = fields.get("year") {
            if year.is_empty() || !year.chars().all(|c| c.is_ascii_digit()) {
                return Err(BibError::MalformedEntry {
                    line: start,
                    detail: format!("year {year:?} is not numeric"),
                });
            }
        }
        Ok(BibEntry { key, kind, fields })
    }

    fn value(&mut self) -> Result<String, BibError> {
        match self.peek() {
            Some('{') => {
                self.bump();
                let mut depth = 0usize;
                let mut out = String::new();
                loop {
                    let c = self.bump().ok_or_else(|| self.error("unterminated value"))?;
                    match c {
                        '{' => depth += 1,
                        '}' if depth == 0 => break,
                        '}' => depth -= 1,
                        _ => {}
                    }
                    out.push(c);
                }
                Ok(out)
            }
            Some(c) if c.is_ascii_digit() => Ok(self.word()),
            _ => Err(self.error("expected a braced or numeric value")),
        }
    }
}
