use crate::macros::MacroTable;
use crate::math::{parse_str, MathNode};

use super::SearchError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    pub word_terms: Vec<String>,
    pub macro_terms: Vec<String>,
    pub tex_terms: Vec<MathNode>,
}

impl Query {
    pub fn is_empty(&self) -> bool {
        self.word_terms.is_empty() && self.macro_terms.is_empty() && self.tex_terms.is_empty()
    }

    /// Index terms for the word and macro parts, in query order.
    pub fn index_terms(&self) -> Vec<String> {
        self.macro_terms
            .iter()
            .map(|m| format!("macro:{m}"))
            .chain(self.word_terms.iter().map(|w| format!("word:{w}")))
            .collect()
    }
}

/// Lowercased maximal runs of ASCII letters.
pub fn words(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_ascii_alphabetic())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
}

fn push_unique<T: PartialEq>(list: &mut Vec<T>, item: T) {
    if !list.contains(&item) {
        list.push(item);
    }
}

/// Query syntax: whitespace-separated terms. `macro:Name` matches formulae
/// applying that macro, `tex:"..."` matches a structural fragment (quotes may
/// enclose spaces), anything else is a keyword.
pub fn parse_query(q: &str, table: &MacroTable) -> Result<Query, SearchError> {
    let mut query = Query::default();
    let mut rest = q.trim_start();
    while !rest.is_empty() {
        if let Some(quoted) = rest.strip_prefix("tex:\"") {
            let end = quoted
                .find('"')
                .ok_or_else(|| SearchError::BadQuery("unterminated tex:\"...\"".into()))?;
            let fragment = &quoted[..end];
            if fragment.trim().is_empty() {
                return Err(SearchError::BadQuery("empty tex fragment".into()));
            }
            let node = parse_str(fragment, table)
                .map_err(|e| SearchError::BadQuery(format!("tex:\"{fragment}\": {e}")))?;
            push_unique(&mut query.tex_terms, node);
            rest = quoted[end + 1..].trim_start();
            continue;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let term = &rest[..end];
        rest = rest[end..].trim_start();
        if let Some(name) = term.strip_prefix("macro:") {
            if !name.is_empty() {
                push_unique(&mut query.macro_terms, name.to_string());
            }
        } else {
            for w in words(term) {
                push_unique(&mut query.word_terms, w);
            }
        }
    }
    Ok(query)
}
