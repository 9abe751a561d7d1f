use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::macros::MacroTable;
use crate::math::parse_str;

use super::{SearchError, SearchIndex};

pub const TERMS_FILE: &str = "terms.tsv";
pub const DOCS_FILE: &str = "docs.tsv";

impl SearchIndex {
    /// Writes `terms.tsv` (term, id, tf) and `docs.tsv` (id, canonical_tex),
    /// both sorted so output is byte-stable.
    pub fn save(&self, dir: &Path) -> Result<(), SearchError> {
        fs::create_dir_all(dir)?;
        let mut terms = String::new();
        for (term, postings) in &self.postings {
            for (id, tf) in postings {
                terms.push_str(&format!("{term}\t{id}\t{tf}\n"));
            }
        }
        let mut docs = String::new();
        for (id, tex) in &self.canonical {
            docs.push_str(&format!("{id}\t{tex}\n"));
        }
        fs::write(dir.join(TERMS_FILE), terms)?;
        fs::write(dir.join(DOCS_FILE), docs)?;
        Ok(())
    }

    /// Reloads a saved index. ASTs are recovered by parsing the stored
    /// canonical source against `table`.
    pub fn load(dir: &Path, table: &MacroTable) -> Result<SearchIndex, SearchError> {
        let docs = fs::read_to_string(dir.join(DOCS_FILE))?;
        let terms = fs::read_to_string(dir.join(TERMS_FILE))?;

        let mut index = SearchIndex::default();
        for (n, line) in docs.lines().enumerate() {
            let (id, tex) = line
                .split_once('\t')
                .ok_or_else(|| corrupt(DOCS_FILE, n + 1, "expected 2 columns"))?;
            let ast = parse_str(tex, table).map_err(|e| corrupt(DOCS_FILE, n + 1, &e.to_string()))?;
            index.asts.insert(id.to_string(), ast);
            index.canonical.insert(id.to_string(), tex.to_string());
        }
        let mut postings: BTreeMap<String, Vec<(String, u32)>> = BTreeMap::new();
        for (n, line) in terms.lines().enumerate() {
            let cols: Vec<&str> = line.split('\t').collect();
            let [term, id, tf] = cols[..] else {
                return Err(corrupt(TERMS_FILE, n + 1, "expected 3 columns"));
            };
            let tf = tf
                .parse()
                .map_err(|_| corrupt(TERMS_FILE, n + 1, "term frequency is not a number"))?;
            if !index.asts.contains_key(id) {
                return Err(corrupt(TERMS_FILE, n + 1, "id missing from docs"));
            }
            postings.entry(term.to_string()).or_default().push((id.to_string(), tf));
        }
        index.postings = postings;
        Ok(index)
    }
}

fn corrupt(file: &str, line: usize, detail: &str) -> SearchError {
    SearchError::CorruptIndex {
        file: file.to_string(),
        line,
        detail: detail.to_string(),
    }
}
