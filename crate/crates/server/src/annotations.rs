use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnnotationKind {
    Talk,
    Erratum,
}

impl FromStr for AnnotationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "talk" => Ok(AnnotationKind::Talk),
            "erratum" => Ok(AnnotationKind::Erratum),
            other => Err(format!("kind must be \"talk\" or \"erratum\", got {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: String,
    pub kind: AnnotationKind,
    pub author: String,
    pub body: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

/// Append-only JSON-lines log. Entries are also kept in memory so reads do
/// not touch the file.
#[derive(Debug)]
pub struct AnnotationLog {
    path: PathBuf,
    entries: Vec<Annotation>,
}

impl AnnotationLog {
    /// Opens the log, loading any existing entries. A missing file is an
    /// empty log.
    pub fn open(path: &Path) -> io::Result<AnnotationLog> {
        let mut entries = Vec::new();
        match File::open(path) {
            Ok(file) => {
                for (n, line) in BufReader::new(file).lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let entry = serde_json::from_str(&line).map_err(|e| {
                        io::Error::new(
                            io::ErrorKind::InvalidData,
                            format!("{} line {}: {e}", path.display(), n + 1),
                        )
                    })?;
                    entries.push(entry);
                }
            }
            Err(e) if e.kind() == io::ErrorKind::NotFound => {}
            Err(e) => return Err(e),
        }
        Ok(AnnotationLog {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Writes one line and syncs it to disk before recording it in memory.
    pub fn append(&mut self, entry: Annotation) -> io::Result<()> {
        let mut line = serde_json::to_string(&entry).map_err(io::Error::other)?;
        line.push('\n');
        let mut file = OpenOptions::new().create(true).append(true).open(&self.path)?;
        file.write_all(line.as_bytes())?;
        file.sync_data()?;
        self.entries.push(entry);
        Ok(())
    }

    pub fn for_formula(&self, id: &str) -> Vec<Annotation> {
        self.entries.iter().filter(|a| a.id == id).cloned().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
