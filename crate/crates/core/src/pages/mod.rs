//! Formula home pages: validated records assembled from seed entries, plus
//! Wikitext and HTML emission and duplicate detection.

mod html;
pub mod seed;
mod wikitext;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::biblio::BibMap;
use crate::macros::MacroTable;
use crate::math::{canonical, parse_str, MathNode, ParseError};

pub use html::{emit_html, math_block};
pub use seed::{parse_seed, SeedEntry, SeedError};
pub use wikitext::emit_wikitext;

/// Page sections after the formula block, in emission order.
pub const SECTIONS: [&str; 7] = [
    "Bibliographic citation",
    "Proofs",
    "Symbols used",
    "Notes",
    "External links",
    "Substitutions",
    "Constraints",
];

pub const OPEN_SECTION: &str = "(open section)";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub url: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaRecord {
    pub id: String,
    pub ast: MathNode,
    pub canonical_tex: String,
    pub constraints: Vec<MathNode>,
    pub substitutions: Vec<MathNode>,
    pub cites: Vec<String>,
    pub proofs: Vec<String>,
    pub notes: Vec<String>,
    pub links: Vec<String>,
    pub symbols: Vec<Symbol>,
    /// FNV-1a 64-bit hash of `canonical_tex`, as 16 lowercase hex digits.
    pub dedup_key: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("no bibliographic citation")]
    MissingCitation,
    #[error("citation {0} does not resolve")]
    DanglingCitation(String),
    #[error("unknown macro \\{0}")]
    UnknownMacro(String),
    #[error("{field}: {detail}")]
    ParseFailure { field: String, detail: String },
}

/// Validates an entry against the dictionary and bibliography. Every problem
/// in the entry is reported, not just the first.
pub fn build_record(
    entry: &SeedEntry,
    table: &MacroTable,
    bib: &BibMap,
) -> Result<FormulaRecord, Vec<ValidationError>> {
    let mut errors = Vec::new();
    let mut parse_field = |field: String, src: &str| match parse_str(src, table) {
        Ok(node) => Some(node),
        Err(ParseError::UnknownControlSequence(name)) => {
            errors.push(ValidationError::UnknownMacro(name));
            None
        }
        Err(e) => {
            errors.push(ValidationError::ParseFailure {
                field,
                detail: e.to_string(),
            });
            None
        }
    };

    let ast = parse_field("formula".into(), &entry.formula_tex);
    let constraints: Vec<_> = entry
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| parse_field(format!("constraint {}", i + 1), c))
        .collect();
    let substitutions: Vec<_> = entry
        .substitutions
        .iter()
        .enumerate()
        .map(|(i, s)| parse_field(format!("substitution {}", i + 1), s))
        .collect();

    if entry.cites.is_empty() {
        errors.push(ValidationError::MissingCitation);
    }
    for key in &entry.cites {
        if !bib.contains(key) {
            errors.push(ValidationError::DanglingCitation(key.clone()));
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let ast = ast.expect("no errors means the formula parsed");
    let canonical_tex = canonical(&ast);
    Ok(FormulaRecord {
        id: entry.label.clone(),
        symbols: extract_symbols(&ast, table),
        dedup_key: dedup_key(&canonical_tex),
        canonical_tex,
        ast,
        constraints: constraints.into_iter().flatten().collect(),
        substitutions: substitutions.into_iter().flatten().collect(),
        cites: entry.cites.clone(),
        proofs: entry.proofs.clone(),
        notes: entry.notes.clone(),
        links: entry.links.clone(),
    })
}

/// Distinct macros of `node` in pre-order of first appearance, with their
/// definition links.
pub fn extract_symbols(node: &MathNode, table: &MacroTable) -> Vec<Symbol> {
    let mut seen = HashSet::new();
    node.macro_names()
        .into_iter()
        .filter(|name| seen.insert(*name))
        .map(|name| Symbol {
            name: name.to_string(),
            url: table.lookup(name).map(|m| m.url.clone()).unwrap_or_default(),
        })
        .collect()
}

/// FNV-1a, 64-bit.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}

pub fn dedup_key(canonical_tex: &str) -> String {
    format!("{:016x}", fnv1a64(canonical_tex.as_bytes()))
}

/// Pairs of ids whose dedup keys coincide, each pair ordered and the list
/// sorted.
pub fn find_duplicates(records: &[FormulaRecord]) -> Vec<(String, String)> {
    let mut by_key: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in records {
        by_key.entry(&r.dedup_key).or_default().push(&r.id);
    }
    let mut pairs = Vec::new();
    for ids in by_key.values() {
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                let (x, y) = if a <= b { (a, b) } else { (b, a) };
                pairs.push((x.to_string(), y.to_string()));
            }
        }
    }
    pairs.sort();
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biblio::parse_bib;
    use crate::macros::load_dictionary;

    const DICT: &str = "\
[macro]
name = JacobiP
params = 3
args = 1
category = orthogonal-polynomial
display = P^{($1,$2)}_{$3}\\left($4\\right)
url = http://dlmf.nist.gov/18.3

[macro]
name = Pochhammer
params = 2
args = 0
category = symbol
display = \\left($1\\right)_{$2}
url = http://dlmf.nist.gov/5.2#iii
";

    fn fixtures() -> (MacroTable, BibMap) {
        (
            load_dictionary(DICT).unwrap(),
            parse_bib("@book{KLS2010, title={Hypergeometric Orthogonal Polynomials}, year={2010}}").unwrap(),
        )
    }

    fn entry(label: &str, formula: &str, cites: &[&str]) -> SeedEntry {
        SeedEntry {
            label: label.into(),
            formula_tex: formula.into(),
            cites: cites.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    #[test]
    fn fnv_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
        assert_eq!(dedup_key(""), "cbf29ce484222325");
    }

    #[test]
    fn dangling_citation() {
        let (t, b) = fixtures();
        let errs = build_record(&entry("A", "x", &["Nope1900"]), &t, &b).unwrap_err();
        assert_eq!(errs, vec![ValidationError::DanglingCitation("Nope1900".into())]);
    }

    #[test]
    fn missing_citation() {
        let (t, b) = fixtures();
        let errs = build_record(&entry("A", "x", &[]), &t, &b).unwrap_err();
        assert_eq!(errs, vec![ValidationError::MissingCitation]);
    }

    #[test]
    fn unknown_macro() {
        let (t, b) = fixtures();
        let errs = build_record(&entry("A", "\\FooBar{x}", &["KLS2010"]), &t, &b).unwrap_err();
        assert_eq!(errs, vec![ValidationError::UnknownMacro("FooBar".into())]);
    }

    #[test]
    fn collects_all_errors() {
        let (t, b) = fixtures();
        let mut e = entry("A", "x+", &["Nope"]);
        e.constraints.push("\\Foo".into());
        let errs = build_record(&e, &t, &b).unwrap_err();
        assert_eq!(errs.len(), 3);
        assert!(matches!(&errs[0], ValidationError::ParseFailure { field, .. } if field == "formula"));
        assert_eq!(errs[1], ValidationError::UnknownMacro("Foo".into()));
        assert_eq!(errs[2], ValidationError::DanglingCitation("Nope".into()));
    }

    #[test]
    fn jacobi_record() {
        let (t, b) = fixtures();
        let r = build_record(&entry("KLS:9.8.1", "\\JacobiP{\\alpha}{\\beta}{n}@{x}", &["KLS2010"]), &t, &b).unwrap();
        assert_eq!(
            r.symbols,
            vec![Symbol {
                name: "JacobiP".into(),
                url: "http://dlmf.nist.gov/18.3".into()
            }]
        );
        assert_eq!(r.dedup_key, dedup_key(&r.canonical_tex));
    }

    #[test]
    fn symbol_extraction_order_and_dedup() {
        let (t, _) = fixtures();
        let plain = parse_str("x+1", &t).unwrap();
        assert!(extract_symbols(&plain, &t).is_empty());

        let nested = parse_str("\\JacobiP{a}{b}{n}@{\\Pochhammer{a}{n}}", &t).unwrap();
        let names: Vec<_> = extract_symbols(&nested, &t).into_iter().map(|s| s.name).collect();
        assert_eq!(names, vec!["JacobiP", "Pochhammer"]);

        let twice = parse_str("\\JacobiP{a}{b}{n}@{x}+\\JacobiP{a}{b}{m}@{x}", &t).unwrap();
        assert_eq!(extract_symbols(&twice, &t).len(), 1);
    }

    #[test]
    fn duplicates() {
        let (t, b) = fixtures();
        let a = build_record(&entry("B", "x+1", &["KLS2010"]), &t, &b).unwrap();
        let c = build_record(&entry("A", "x + {1}", &["KLS2010"]), &t, &b).unwrap();
        let d = build_record(&entry("C", "x+2", &["KLS2010"]), &t, &b).unwrap();
        assert_eq!(
            find_duplicates(&[a.clone(), c, d.clone()]),
            vec![("A".to_string(), "B".to_string())]
        );
        assert!(find_duplicates(&[a.clone(), d]).is_empty());
        assert!(find_duplicates(&[a]).is_empty());
    }
}
