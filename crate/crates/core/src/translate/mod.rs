//! Output formats for a formula: LaTeX with or without semantic macros,
//! presentation MathML, and computer-algebra input.

mod cas;
mod mathml;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::macros::{expand_all, CasTarget, ExpandError, MacroTable};
use crate::math::canonical;
use crate::pages::FormulaRecord;

pub use cas::to_cas;
pub use mathml::{escape_xml, to_mathml};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error(transparent)]
    Expand(#[from] ExpandError),
    #[error("\\{name} has no {target} template")]
    MissingCasTemplate { name: String, target: CasTarget },
    #[error("cannot translate {0}")]
    UntranslatableConstruct(String),
    #[error("unknown export format {0:?}")]
    UnknownFormat(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExportFormat {
    Tex,
    SemanticTex,
    Mathml,
    Cas(CasTarget),
}

impl ExportFormat {
    pub const ALL: [ExportFormat; 6] = [
        ExportFormat::Tex,
        ExportFormat::SemanticTex,
        ExportFormat::Mathml,
        ExportFormat::Cas(CasTarget::Mathematica),
        ExportFormat::Cas(CasTarget::Maple),
        ExportFormat::Cas(CasTarget::Sage),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExportFormat::Tex => "tex",
            ExportFormat::SemanticTex => "semantic-tex",
            ExportFormat::Mathml => "mathml",
            ExportFormat::Cas(target) => target.as_str(),
        }
    }
}

impl fmt::Display for ExportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExportFormat {
    type Err = TranslateError;

    fn from_str(s: &str) -> Result<Self, TranslateError> {
        ExportFormat::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| TranslateError::UnknownFormat(s.to_string()))
    }
}

/// Produces the clipboard text of a record in the requested format.
pub fn export(
    record: &FormulaRecord,
    format: ExportFormat,
    table: &MacroTable,
) -> Result<String, TranslateError> {
    match format {
        ExportFormat::Tex => Ok(canonical(&expand_all(&record.ast, table)?)),
        ExportFormat::SemanticTex => Ok(record.canonical_tex.clone()),
        ExportFormat::Mathml => to_mathml(&record.ast, table),
        ExportFormat::Cas(target) => to_cas(&record.ast, table, target),
    }
}

/// Export by format name.
pub fn export_named(
    record: &FormulaRecord,
    format: &str,
    table: &MacroTable,
) -> Result<String, TranslateError> {
    export(record, format.parse()?, table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biblio::parse_bib;
    use crate::macros::load_dictionary;
    use crate::pages::{build_record, SeedEntry};

    const DICT: &str = "\
[macro]
name = JacobiP
params = 3
args = 1
category = orthogonal-polynomial
display = P^{($1,$2)}_{$3}\\left($4\\right)
url = http://dlmf.nist.gov/18.3
mathematica = JacobiP[$3,$1,$2,$4]
";

    fn jacobi_record() -> (FormulaRecord, MacroTable) {
        let table = load_dictionary(DICT).unwrap();
        let bib = parse_bib("@book{K, title={T}}").unwrap();
        let entry = SeedEntry {
            label: "J".into(),
            formula_tex: "\\JacobiP{a}{b}{n}@{x}".into(),
            cites: vec!["K".into()],
            ..Default::default()
        };
        (build_record(&entry, &table, &bib).unwrap(), table)
    }

    #[test]
    fn semantic_tex_is_stored_source() {
        let (r, t) = jacobi_record();
        assert_eq!(export(&r, ExportFormat::SemanticTex, &t).unwrap(), r.canonical_tex);
    }

    #[test]
    fn tex_expands_macros() {
        let (r, t) = jacobi_record();
        assert_eq!(
            export(&r, ExportFormat::Tex, &t).unwrap(),
            "P^{(a,b)}_{n}\\left(x\\right)"
        );
    }

    #[test]
    fn unknown_format() {
        let (r, t) = jacobi_record();
        assert_eq!(
            export_named(&r, "pdf", &t),
            Err(TranslateError::UnknownFormat("pdf".into()))
        );
        assert_eq!(export_named(&r, "mathematica", &t).unwrap(), "JacobiP[n,a,b,x]");
    }

    #[test]
    fn missing_template() {
        let (r, t) = jacobi_record();
        assert_eq!(
            export(&r, ExportFormat::Cas(CasTarget::Maple), &t),
            Err(TranslateError::MissingCasTemplate {
                name: "JacobiP".into(),
                target: CasTarget::Maple
            })
        );
    }

    #[test]
    fn format_names_round_trip() {
        for f in ExportFormat::ALL {
            assert_eq!(f.as_str().parse::<ExportFormat>().unwrap(), f);
        }
    }
}
