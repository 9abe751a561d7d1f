//! Keyword, macro-name and structural search over built formula records.

mod oracle;
mod persist;
mod query;

use std::collections::BTreeMap;
use std::io;

use thiserror::Error;

use crate::math::{contains_subterm, MathNode};
use crate::pages::FormulaRecord;

pub use oracle::oracle_scan;
pub use persist::{DOCS_FILE, TERMS_FILE};
pub use query::{parse_query, words, Query};

/// Bonus added per satisfied structural term.
pub const TEX_TERM_SCORE: f64 = 2.0;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("bad query: {0}")]
    BadQuery(String),
    #[error("{file} line {line}: {detail}")]
    CorruptIndex { file: String, line: usize, detail: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchIndex {
    /// term → (id, tf), ids ascending.
    pub postings: BTreeMap<String, Vec<(String, u32)>>,
    pub asts: BTreeMap<String, MathNode>,
    canonical: BTreeMap<String, String>,
}

/// Term frequencies of one record: `macro:` terms from the formula AST and
/// `word:` terms from the id and notes.
pub fn record_terms(record: &FormulaRecord) -> BTreeMap<String, u32> {
    let mut tf = BTreeMap::new();
    for name in record.ast.macro_names() {
        *tf.entry(format!("macro:{name}")).or_insert(0) += 1;
    }
    for text in std::iter::once(&record.id).chain(&record.notes) {
        for w in words(text) {
            *tf.entry(format!("word:{w}")).or_insert(0) += 1;
        }
    }
    tf
}

impl SearchIndex {
    pub fn build(records: &[FormulaRecord]) -> SearchIndex {
        let mut index = SearchIndex::default();
        let mut sorted: Vec<&FormulaRecord> = records.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        for record in sorted {
            for (term, tf) in record_terms(record) {
                index.postings.entry(term).or_default().push((record.id.clone(), tf));
            }
            index.asts.insert(record.id.clone(), record.ast.clone());
            index.canonical.insert(record.id.clone(), record.canonical_tex.clone());
        }
        index
    }

    pub fn doc_count(&self) -> usize {
        self.asts.len()
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn idf(&self, term: &str) -> f64 {
        ((1 + self.doc_count()) as f64 / (1 + self.df(term)) as f64).ln() + 1.0
    }

    /// Ranked `(id, score)` pairs, best first, ties broken by id.
    pub fn execute(&self, query: &Query, k: usize) -> Vec<(String, f64)> {
        if query.is_empty() {
            return Vec::new();
        }
        let terms = query.index_terms();
        let mut scores: BTreeMap<&str, f64> = BTreeMap::new();
        if terms.is_empty() {
            scores.extend(self.asts.keys().map(|id| (id.as_str(), 0.0)));
        }
        for term in &terms {
            let idf = self.idf(term);
            for (id, tf) in self.postings.get(term).into_iter().flatten() {
                *scores.entry(id).or_insert(0.0) += f64::from(*tf) * idf;
            }
        }
        let tex_bonus = TEX_TERM_SCORE * query.tex_terms.len() as f64;
        let mut hits: Vec<(String, f64)> = scores
            .into_iter()
            .filter(|(id, _)| {
                let ast = &self.asts[*id];
                query.tex_terms.iter().all(|t| contains_subterm(ast, t))
            })
            .map(|(id, s)| (id.to_string(), s + tex_bonus))
            .collect();
        hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        hits.truncate(k);
        hits
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biblio::parse_bib;
    use crate::macros::{load_dictionary, MacroTable};
    use crate::pages::{build_record, SeedEntry};

    const DICT: &str = "\
[macro]
name = JacobiP
params = 3
args = 1
category = orthogonal-polynomial
display = P^{($1,$2)}_{$3}\\left($4\\right)
url = http://dlmf.nist.gov/18.3
";

    fn record(table: &MacroTable, id: &str, tex: &str, notes: &[&str]) -> FormulaRecord {
        let bib = parse_bib("@book{K, title={T}}").unwrap();
        let entry = SeedEntry {
            label: id.into(),
            formula_tex: tex.into(),
            cites: vec!["K".into()],
            notes: notes.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        };
        build_record(&entry, table, &bib).unwrap()
    }

    fn corpus() -> (Vec<FormulaRecord>, MacroTable) {
        let t = load_dictionary(DICT).unwrap();
        let records = vec![
            record(&t, "a", "\\JacobiP{a}{b}{n}@{x}=x+1", &["orthogonality relation"]),
            record(&t, "b", "y=x+1", &[]),
            record(&t, "c", "\\JacobiP{a}{b}{n}@{x}+\\JacobiP{a}{b}{m}@{x}", &[]),
        ];
        (records, t)
    }

    #[test]
    fn single_record_postings() {
        let (records, _) = corpus();
        let index = SearchIndex::build(&records[..1]);
        assert_eq!(index.postings["macro:JacobiP"], vec![("a".to_string(), 1)]);
        assert_eq!(index.df("macro:JacobiP"), 1);
        assert!(index.postings.contains_key("word:orthogonality"));
        assert!(index.postings.contains_key("word:relation"));
    }

    #[test]
    fn empty_index() {
        let index = SearchIndex::build(&[]);
        assert_eq!(index.doc_count(), 0);
        assert!(index.postings.is_empty());
    }

    #[test]
    fn macro_query_scores() {
        let (records, t) = corpus();
        let index = SearchIndex::build(&records);
        let q = parse_query("macro:JacobiP", &t).unwrap();
        let idf = (4.0f64 / 3.0).ln() + 1.0;
        let hits = index.execute(&q, 10);
        assert_eq!(hits.len(), 2);
        assert_eq!(hits[0].0, "c");
        assert!((hits[0].1 - 2.0 * idf).abs() < 1e-12);
        assert_eq!(hits[1].0, "a");
        assert!((hits[1].1 - idf).abs() < 1e-12);
    }

    #[test]
    fn tex_only_query() {
        let (records, t) = corpus();
        let index = SearchIndex::build(&records);
        let q = parse_query("tex:\"x+1\"", &t).unwrap();
        let hits = index.execute(&q, 10);
        assert_eq!(hits, vec![("a".to_string(), 2.0), ("b".to_string(), 2.0)]);
        assert_eq!(
            oracle_scan(&records, &q),
            ["a", "b"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn tex_filters_keyword_candidates() {
        let (records, t) = corpus();
        let index = SearchIndex::build(&records);
        let q = parse_query("macro:JacobiP tex:\"x+1\"", &t).unwrap();
        let ids: Vec<_> = index.execute(&q, 10).into_iter().map(|h| h.0).collect();
        assert_eq!(ids, vec!["a"]);
    }

    #[test]
    fn empty_query_and_truncation() {
        let (records, t) = corpus();
        let index = SearchIndex::build(&records);
        assert!(index.execute(&Query::default(), 10).is_empty());
        let q = parse_query("tex:\"x\"", &t).unwrap();
        assert_eq!(index.execute(&q, 1).len(), 1);
    }

    #[test]
    fn save_and_reload() {
        let (records, t) = corpus();
        let index = SearchIndex::build(&records);
        let dir = tempfile::tempdir().unwrap();
        index.save(dir.path()).unwrap();
        let reloaded = SearchIndex::load(dir.path(), &t).unwrap();
        assert_eq!(reloaded, index);
        let q = parse_query("macro:JacobiP relation tex:\"x\"", &t).unwrap();
        assert_eq!(reloaded.execute(&q, 10), index.execute(&q, 10));
    }
}
