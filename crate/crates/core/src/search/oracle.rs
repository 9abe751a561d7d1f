use std::collections::BTreeSet;

use crate::math::enumerate_subterms;
use crate::pages::FormulaRecord;

use super::Query;

/// Reference matcher: applies the query definition to each record directly,
/// without postings and with materialized subterm lists.
pub fn oracle_scan(records: &[FormulaRecord], query: &Query) -> BTreeSet<String> {
    if query.is_empty() {
        return BTreeSet::new();
    }
    let keyword_free = query.word_terms.is_empty() && query.macro_terms.is_empty();
    records
        .iter()
        .filter(|r| {
            keyword_free
                || query.macro_terms.iter().any(|m| r.ast.macro_names().contains(&m.as_str()))
                || query.word_terms.iter().any(|w| has_word(r, w))
        })
        .filter(|r| {
            let subterms = enumerate_subterms(&r.ast);
            query.tex_terms.iter().all(|t| subterms.contains(t))
        })
        .map(|r| r.id.clone())
        .collect()
}

fn has_word(record: &FormulaRecord, word: &str) -> bool {
    std::iter::once(&record.id).chain(&record.notes).any(|text| {
        text.split(|c: char| !c.is_ascii_alphabetic())
            .any(|w| w.eq_ignore_ascii_case(word))
    })
}
