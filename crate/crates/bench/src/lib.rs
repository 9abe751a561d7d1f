//! Inputs shared by the benchmarks: the fixture corpora, loaded once.

use std::path::{Path, PathBuf};

use formulary_core::repo::{load_sources, Repository, SourcePaths};
use formulary_core::replace::{load_rules, RuleSet};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// The 30-entry clean corpus.
pub fn clean_repo() -> Repository {
    load_sources(&SourcePaths::in_dir(&fixtures().join("clean"))).expect("clean fixture loads")
}

/// The plain-LaTeX seed file and its rule set.
pub fn plain_inputs() -> (String, RuleSet) {
    let dir = fixtures().join("plain");
    let text = std::fs::read_to_string(dir.join("plain.fseed")).expect("plain fixture");
    let rules = std::fs::read_to_string(dir.join("rules.txt")).expect("rule file");
    (text, load_rules(&rules).expect("rules parse"))
}
