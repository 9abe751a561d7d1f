//! Source repositories and build directories.
//!
//! A source repository is a directory holding `macros.dict`,
//! `bibliography.bib` and `sources/*.fseed`. A build directory contains the
//! generated pages, the search index, `manifest.tsv`, and a copy of the
//! inputs in the same layout, so it can be reloaded as a repository.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::biblio::{parse_bib, BibMap};
use crate::macros::{load_dictionary, MacroTable};
use crate::pages::{build_record, emit_html, emit_wikitext, find_duplicates, parse_seed, FormulaRecord};
use crate::search::{SearchError, SearchIndex};

pub const DICT_FILE: &str = "macros.dict";
pub const BIB_FILE: &str = "bibliography.bib";
pub const SOURCES_DIR: &str = "sources";
pub const SEED_EXT: &str = "fseed";
pub const PAGES_DIR: &str = "pages";
pub const INDEX_DIR: &str = "index";
pub const MANIFEST_FILE: &str = "manifest.tsv";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePaths {
    pub dict: PathBuf,
    pub bib: PathBuf,
    pub sources: PathBuf,
}

impl SourcePaths {
    pub fn in_dir(dir: &Path) -> SourcePaths {
        SourcePaths {
            dict: dir.join(DICT_FILE),
            bib: dir.join(BIB_FILE),
            sources: dir.join(SOURCES_DIR),
        }
    }
}

/// One content problem, located by file and, when known, entry label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Issue {
    pub file: String,
    pub label: Option<String>,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(label) => write!(f, "{}: {}: {}", self.file, label, self.message),
            None => write!(f, "{}: {}", self.file, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{} content error(s)", .0.len())]
    Content(Vec<Issue>),
    #[error("corrupt build: {0}")]
    CorruptBuild(String),
}

impl From<SearchError> for RepoError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::Io(source) => RepoError::Io {
                path: PathBuf::from(INDEX_DIR),
                source,
            },
            other => RepoError::CorruptBuild(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, RepoError> {
    fs::read_to_string(path).map_err(|source| RepoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), RepoError> {
    fs::write(path, contents).map_err(|source| RepoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RepoError + '_ {
    move |source| RepoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A validated repository: every entry of every seed file built into a record.
#[derive(Debug, Clone)]
pub struct Repository {
    pub table: MacroTable,
    pub bib: BibMap,
    /// Records in source-file order (files sorted by name).
    pub records: Vec<FormulaRecord>,
    /// Record id → seed file name.
    pub origins: BTreeMap<String, String>,
    dict_text: String,
    bib_text: String,
    seeds: Vec<(String, String)>,
}

impl Repository {
    pub fn record(&self, id: &str) -> Option<&FormulaRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

/// Loads and validates a repository, collecting every content problem.
/// Unreadable inputs are I/O errors; anything wrong inside them is reported
/// as `RepoError::Content`.
pub fn load_sources(paths: &SourcePaths) -> Result<Repository, RepoError> {
    let dict_text = read(&paths.dict)?;
    let bib_text = read(&paths.bib)?;
    let mut seed_paths: Vec<PathBuf> = fs::read_dir(&paths.sources)
        .map_err(io_err(&paths.sources))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == SEED_EXT))
        .collect();
    seed_paths.sort();

    let mut issues = Vec::new();
    let table = load_dictionary(&dict_text).unwrap_or_else(|e| {
        issues.push(Issue {
            file: file_name(&paths.dict),
            label: None,
            message: e.to_string(),
        });
        MacroTable::default()
    });
    let bib = parse_bib(&bib_text).unwrap_or_else(|e| {
        issues.push(Issue {
            file: file_name(&paths.bib),
            label: None,
            message: e.to_string(),
        });
        BibMap::default()
    });

    let mut seeds = Vec::new();
    let mut records = Vec::new();
    let mut origins = BTreeMap::new();
    for path in seed_paths {
        let name = file_name(&path);
        let text = read(&path)?;
        match parse_seed(&text) {
            Err(e) => issues.push(Issue {
                file: name.clone(),
                label: None,
                message: e.to_string(),
            }),
            Ok(entries) => {
                for entry in entries {
                    if let Some(first) = origins.get(&entry.label) {
                        issues.push(Issue {
                            file: name.clone(),
                            label: Some(entry.label.clone()),
                            message: format!("label already defined in {first}"),
                        });
                        continue;
                    }
                    origins.insert(entry.label.clone(), name.clone());
                    match build_record(&entry, &table, &bib) {
                        Ok(record) => records.push(record),
                        Err(errors) => issues.extend(errors.into_iter().map(|e| Issue {
                            file: name.clone(),
                            label: Some(entry.label.clone()),
                            message: e.to_string(),
                        })),
                    }
                }
            }
        }
        seeds.push((name, text));
    }

    if !issues.is_empty() {
        return Err(RepoError::Content(issues));
    }
    Ok(Repository {
        table,
        bib,
        records,
        origins,
        dict_text,
        bib_text,
        seeds,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestRow {
    pub id: String,
    pub dedup_key: String,
    pub source: String,
    pub canonical_tex: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuildSummary {
    pub pages: usize,
    pub duplicates: Vec<(String, String)>,
}

/// Writes the build to `out`. Output is assembled in a sibling temporary
/// directory and moved into place only once complete; an existing `out` is
/// replaced.
pub fn build(repo: &Repository, out: &Path) -> Result<BuildSummary, RepoError> {
    let parent = match out.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent).map_err(io_err(&parent))?;
    let staging = tempfile::Builder::new()
        .prefix(".formulary-build-")
        .tempdir_in(&parent)
        .map_err(io_err(&parent))?;
    let root = staging.path();

    let pages = root.join(PAGES_DIR);
    let sources = root.join(SOURCES_DIR);
    fs::create_dir(&pages).map_err(io_err(&pages))?;
    fs::create_dir(&sources).map_err(io_err(&sources))?;

    let mut html_issues = Vec::new();
    for record in &repo.records {
        write(
            &pages.join(format!("{}.wiki", record.id)),
            &emit_wikitext(record, &repo.bib),
        )?;
        match emit_html(record, &repo.table, &repo.bib) {
            Ok(html) => write(&pages.join(format!("{}.html", record.id)), &html)?,
            Err(e) => html_issues.push(Issue {
                file: repo.origins[&record.id].clone(),
                label: Some(record.id.clone()),
                message: e.to_string(),
            }),
        }
    }
    if !html_issues.is_empty() {
        return Err(RepoError::Content(html_issues));
    }

    SearchIndex::build(&repo.records).save(&root.join(INDEX_DIR))?;

    let mut manifest = String::new();
    for r in &repo.records {
        manifest.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.id, r.dedup_key, repo.origins[&r.id], r.canonical_tex
        ));
    }
    write(&root.join(MANIFEST_FILE), &manifest)?;
    write(&root.join(DICT_FILE), &repo.dict_text)?;
    write(&root.join(BIB_FILE), &repo.bib_text)?;
    for (name, text) in &repo.seeds {
        write(&sources.join(name), text)?;
    }

    if out.exists() {
        fs::remove_dir_all(out).map_err(io_err(out))?;
    }
    let staged = staging.keep();
    fs::rename(&staged, out).map_err(io_err(out))?;

    Ok(BuildSummary {
        pages: repo.records.len(),
        duplicates: find_duplicates(&repo.records),
    })
}

pub fn read_manifest(dir: &Path) -> Result<Vec<ManifestRow>, RepoError> {
    let text = read(&dir.join(MANIFEST_FILE))?;
    text.lines()
        .enumerate()
        .map(|(n, line)| {
            let cols: Vec<&str> = line.splitn(4, '\t').collect();
            match cols[..] {
                [id, key, source, tex] => Ok(ManifestRow {
                    id: id.to_string(),
                    dedup_key: key.to_string(),
                    source: source.to_string(),
                    canonical_tex: tex.to_string(),
                }),
                _ => Err(RepoError::CorruptBuild(format!(
                    "{MANIFEST_FILE} line {}: expected 4 columns",
                    n + 1
                ))),
            }
        })
        .collect()
}

/// A completed build loaded back from disk.
#[derive(Debug, Clone)]
pub struct LoadedBuild {
    pub repo: Repository,
    pub index: SearchIndex,
    pub manifest: Vec<ManifestRow>,
}

/// Reloads a build directory and checks that the manifest agrees with the
/// records rebuilt from the copied sources.
pub fn load_build(dir: &Path) -> Result<LoadedBuild, RepoError> {
    let manifest = read_manifest(dir)?;
    let repo = load_sources(&SourcePaths::in_dir(dir))?;
    let index = SearchIndex::load(&dir.join(INDEX_DIR), &repo.table)?;
    if manifest.len() != repo.records.len() {
        return Err(RepoError::CorruptBuild(format!(
            "manifest lists {} formulae, sources define {}",
            manifest.len(),
            repo.records.len()
        )));
    }
    for row in &manifest {
        match repo.record(&row.id) {
            Some(r) if r.canonical_tex == row.canonical_tex => {}
            _ => {
                return Err(RepoError::CorruptBuild(format!(
                    "manifest entry {} does not match sources",
                    row.id
                )))
            }
        }
    }
    Ok(LoadedBuild {
        repo,
        index,
        manifest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const DICT: &str = "\
[macro]
name = EulerGamma
params = 0
args = 1
category = special-function
display = \\Gamma\\left($1\\right)
url = http://dlmf.nist.gov/5.2.E1
mathematica = Gamma[$1]
";
    const BIB: &str = "@book{DLMF, title={Digital Library}, year=2010}\n";
    const SEED: &str = "\
\\begin{drmf:formula}
\\label{gamma:rec}
\\formula{\\EulerGamma@{z+1}=z\\EulerGamma@{z}}
\\cite{DLMF}
\\end{drmf:formula}
";

    fn write_repo(dir: &Path, seed: &str) {
        fs::write(dir.join(DICT_FILE), DICT).unwrap();
        fs::write(dir.join(BIB_FILE), BIB).unwrap();
        fs::create_dir_all(dir.join(SOURCES_DIR)).unwrap();
        fs::write(dir.join(SOURCES_DIR).join("a.fseed"), seed).unwrap();
    }

    #[test]
    fn build_and_reload() {
        let tmp = tempfile::tempdir().unwrap();
        let src = tmp.path().join("src");
        fs::create_dir(&src).unwrap();
        write_repo(&src, SEED);
        let repo = load_sources(&SourcePaths::in_dir(&src)).unwrap();
        let out = tmp.path().join("out");
        let summary = build(&repo, &out).unwrap();
        assert_eq!(summary.pages, 1);
        assert!(out.join("pages/gamma:rec.wiki").is_file());
        assert!(out.join("pages/gamma:rec.html").is_file());

        let loaded = load_build(&out).unwrap();
        assert_eq!(loaded.manifest.len(), 1);
        assert_eq!(loaded.manifest[0].source, "a.fseed");
        assert_eq!(loaded.manifest[0].canonical_tex, repo.records[0].canonical_tex);
        assert_eq!(loaded.index, SearchIndex::build(&repo.records));
        // no staging directories left behind
        let leftovers = fs::read_dir(tmp.path()).unwrap().count();
        assert_eq!(leftovers, 2);
    }

    #[test]
    fn content_errors_are_collected() {
        let tmp = tempfile::tempdir().unwrap();
        let bad = SEED.replace("\\cite{DLMF}", "\\cite{Nope1900}").replace("z+1", "\\Foo{z}");
        write_repo(tmp.path(), &bad);
        let Err(RepoError::Content(issues)) = load_sources(&SourcePaths::in_dir(tmp.path())) else {
            panic!("expected content errors");
        };
        assert_eq!(issues.len(), 2);
        assert!(issues.iter().all(|i| i.file == "a.fseed"));
        assert!(issues.iter().any(|i| i.message.contains("Nope1900")));
    }

    #[test]
    fn missing_directory_is_io() {
        let err = load_sources(&SourcePaths::in_dir(Path::new("/nonexistent/repo"))).unwrap_err();
        assert!(matches!(err, RepoError::Io { .. }));
    }
}
