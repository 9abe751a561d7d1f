//! Compiler and query engine for compendia of mathematical formulae.
//!
//! Formula collections are written as annotated LaTeX seed files that use
//! semantic macros. The crate parses them against a macro dictionary and a
//! bibliography, validates each formula home page, emits Wikitext and HTML
//! pages, indexes the results for keyword and structural search, and
//! translates formulae to MathML and computer-algebra input.

pub mod biblio;
pub mod macros;
pub mod math;
pub mod pages;
pub mod replace;
pub mod repo;
pub mod search;
pub mod translate;

pub use biblio::{BibEntry, BibMap};
pub use macros::{CasTarget, MacroTable, SemanticMacro};
pub use math::{MathNode, Token};
pub use pages::FormulaRecord;
pub use search::{Query, SearchIndex};
pub use translate::ExportFormat;
