//! Semantic macro dictionary.
//!
//! A semantic macro binds a control-sequence name to one mathematical object:
//! its parameter and argument counts, a display template used for rendering,
//! a definition link, and optional computer-algebra templates. Templates refer
//! to operands as `$1..$n`, parameters first and then arguments.
//!
//! The dictionary file is a sequence of blocks:
//!
//! ```text
//! [macro]
//! name = JacobiP
//! params = 3
//! args = 1
//! category = orthogonal-polynomial
//! display = P^{($1,$2)}_{$3}\left($4\right)
//! url = http://dlmf.nist.gov/18.3
//! mathematica = JacobiP[$3,$1,$2,$4]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{canonical, is_builtin, parse_str, MathNode, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    SpecialFunction,
    OrthogonalPolynomial,
    Symbol,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::SpecialFunction => "special-function",
            Category::OrthogonalPolynomial => "orthogonal-polynomial",
            Category::Symbol => "symbol",
        }
    }
}

impl FromStr for Category {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "special-function" => Ok(Category::SpecialFunction),
            "orthogonal-polynomial" => Ok(Category::OrthogonalPolynomial),
            "symbol" => Ok(Category::Symbol),
            _ => Err(()),
        }
    }
}

/// Computer algebra systems with translation templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CasTarget {
    Mathematica,
    Maple,
    Sage,
}

impl CasTarget {
    pub const ALL: [CasTarget; 3] = [CasTarget::Mathematica, CasTarget::Maple, CasTarget::Sage];

    pub fn as_str(self) -> &'static str {
        match self {
            CasTarget::Mathematica => "mathematica",
            CasTarget::Maple => "maple",
            CasTarget::Sage => "sage",
        }
    }
}

impl fmt::Display for CasTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CasTarget {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        CasTarget::ALL.into_iter().find(|t| t.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticMacro {
    pub name: String,
    pub params: usize,
    pub args: usize,
    pub category: Category,
    pub display: String,
    pub url: String,
    pub cas: BTreeMap<CasTarget, String>,
}

impl SemanticMacro {
    pub fn arity(&self) -> usize {
        self.params + self.args
    }

    pub fn cas_template(&self, target: CasTarget) -> Option<&str> {
        self.cas.get(&target).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DictError {
    #[error("macro {0} is declared twice")]
    DuplicateMacro(String),
    #[error("macro {name}: placeholder ${index} is out of range")]
    BadPlaceholder { name: String, index: usize },
    #[error("macro {name}: missing field {field}")]
    MissingField { name: String, field: &'static str },
    #[error("line {line}: {detail}")]
    MalformedBlock { line: usize, detail: String },
    #[error("macro {name}: display template does not parse: {detail}")]
    BadDisplay { name: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("unknown macro \\{0}")]
    UnknownMacro(String),
    #[error("display of \\{name} failed to parse after substitution: {source}")]
    Display { name: String, source: ParseError },
}

/// Name-indexed collection of semantic macros. An empty table disables macro
/// recognition in the parser.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MacroTable {
    entries: BTreeMap<String, SemanticMacro>,
}

impl MacroTable {
    pub fn insert(&mut self, entry: SemanticMacro) -> Result<(), DictError> {
        if self.entries.contains_key(&entry.name) {
            return Err(DictError::DuplicateMacro(entry.name));
        }
        self.entries.insert(entry.name.clone(), entry);
        Ok(())
    }

    /// Exact, case-sensitive lookup.
    pub fn lookup(&self, name: &str) -> Option<&SemanticMacro> {
        self.entries.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SemanticMacro> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Serializes back into the dictionary file format, sorted by name.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in self.entries.values() {
            out.push_str("[macro]\n");
            out.push_str(&format!("name = {}\n", m.name));
            out.push_str(&format!("params = {}\n", m.params));
            out.push_str(&format!("args = {}\n", m.args));
            out.push_str(&format!("category = {}\n", m.category.as_str()));
            out.push_str(&format!("display = {}\n", m.display));
            out.push_str(&format!("url = {}\n", m.url));
            for (target, template) in &m.cas {
                out.push_str(&format!("{} = {}\n", target, template));
            }
            out.push('\n');
        }
        out
    }
}

/// Loads a dictionary file, checking every entry invariant.
pub fn load_dictionary(text: &str) -> Result<MacroTable, DictError> {
    let mut table = MacroTable::default();
    let mut block: Option<RawBlock> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if let Some(b) = block.take() {
                table.insert(b.finish()?)?;
            }
            continue;
        }
        if line == "[macro]" {
            if let Some(b) = block.take() {
                table.insert(b.finish()?)?;
            }
            block = Some(RawBlock::new(line_no));
            continue;
        }
        let Some(b) = block.as_mut() else {
            return Err(malformed(line_no, "content outside a [macro] block"));
        };
        let Some((key, value)) = line.split_once('=') else {
            return Err(malformed(line_no, "expected key = value"));
        };
        let (key, value) = (key.trim(), value.trim());
        if b.fields.insert(key.to_string(), (line_no, value.to_string())).is_some() {
            return Err(malformed(line_no, format!("field {key} repeated")));
        }
    }
    if let Some(b) = block.take() {
        table.insert(b.finish()?)?;
    }
    Ok(table)
}

fn malformed(line: usize, detail: impl Into<String>) -> DictError {
    DictError::MalformedBlock {
        line,
        detail: detail.into(),
    }
}

struct RawBlock {
    start: usize,
    fields: BTreeMap<String, (usize, String)>,
}

impl RawBlock {
    fn new(start: usize) -> Self {
        RawBlock {
            start,
            fields: BTreeMap::new(),
        }
    }

    fn finish(mut self) -> Result<SemanticMacro, DictError> {
        let Some((name_line, name)) = self.fields.remove("name") else {
            return Err(DictError::MissingField {
                name: format!("<block at line {}>", self.start),
                field: "name",
            });
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(malformed(name_line, format!("invalid macro name {name:?}")));
        }
        if is_builtin(&name) {
            return Err(malformed(name_line, format!("{name} is a built-in control sequence")));
        }
        let mut take = |field: &'static str| {
            self.fields.remove(field).ok_or_else(|| DictError::MissingField {
                name: name.clone(),
                field,
            })
        };
        let count = |(line, value): (usize, String)| {
            value
                .parse::<usize>()
                .map_err(|_| malformed(line, format!("expected a count, got {value:?}")))
        };
        let params = count(take("params")?)?;
        let args = count(take("args")?)?;
        let (cat_line, cat) = take("category")?;
        let category = cat
            .parse()
            .map_err(|_| malformed(cat_line, format!("unknown category {cat:?}")))?;
        let (_, display) = take("display")?;
        let (_, url) = take("url")?;

        let mut cas = BTreeMap::new();
        for target in CasTarget::ALL {
            if let Some((_, template)) = self.fields.remove(target.as_str()) {
                cas.insert(target, template);
            }
        }
        if let Some((key, (line, _))) = self.fields.into_iter().next() {
            return Err(malformed(line, format!("unknown field {key}")));
        }

        let entry = SemanticMacro {
            name,
            params,
            args,
            category,
            display,
            url,
            cas,
        };
        check_entry(&entry)?;
        Ok(entry)
    }
}

fn check_entry(entry: &SemanticMacro) -> Result<(), DictError> {
    let arity = entry.arity();
    let templates = std::iter::once(entry.display.as_str()).chain(entry.cas.values().map(String::as_str));
    for template in templates {
        for index in placeholders(template) {
            if index == 0 || index > arity {
                return Err(DictError::BadPlaceholder {
                    name: entry.name.clone(),
                    index,
                });
            }
        }
    }
    let probe = substitute(&entry.display, &vec!["x".to_string(); arity]);
    parse_str(&probe, &MacroTable::default()).map_err(|e| DictError::BadDisplay {
        name: entry.name.clone(),
        detail: e.to_string(),
    })?;
    Ok(())
}

/// Placeholder indices in template order. A `$` without digits yields 0.
pub fn placeholders(template: &str) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(at) = rest.find('$') {
        rest = &rest[at + 1..];
        let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
        out.push(rest[..digits].parse().unwrap_or(0));
        rest = &rest[digits..];
    }
    out
}

/// Replaces each `$k` with `values[k - 1]`.
pub fn substitute(template: &str, values: &[String]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(at) = rest.find('$') {
        out.push_str(&rest[..at]);
        rest = &rest[at + 1..];
        let digits = rest.bytes().take_while(u8::is_ascii_digit).count();
        match rest[..digits].parse::<usize>().ok().and_then(|k| values.get(k.wrapping_sub(1))) {
            Some(v) => out.push_str(v),
            None => {
                out.push('$');
                out.push_str(&rest[..digits]);
            }
        }
        rest = &rest[digits..];
    }
    out.push_str(rest);
    out
}

/// Expands one application into its display form. Operands are expanded
/// first, so the result contains no applications.
pub fn expand_display(app: &MathNode, table: &MacroTable) -> Result<MathNode, ExpandError> {
    let MathNode::Apply { name, params, args } = app else {
        return expand_all(app, table);
    };
    let entry = table
        .lookup(name)
        .ok_or_else(|| ExpandError::UnknownMacro(name.clone()))?;
    let operands = params
        .iter()
        .chain(args.iter())
        .map(|op| expand_all(op, table).map(|n| format!("{{{}}}", canonical(&n))))
        .collect::<Result<Vec<_>, _>>()?;
    let text = substitute(&entry.display, &operands);
    parse_str(&text, &MacroTable::default()).map_err(|source| ExpandError::Display {
        name: name.clone(),
        source,
    })
}

/// Replaces every application in the tree by its display form.
pub fn expand_all(node: &MathNode, table: &MacroTable) -> Result<MathNode, ExpandError> {
    Ok(match node {
        MathNode::Num(_) | MathNode::Sym(_) | MathNode::Op { .. } => node.clone(),
        MathNode::Apply { .. } => expand_display(node, table)?,
        MathNode::Row(children) => {
            let parts = children
                .iter()
                .map(|c| expand_all(c, table))
                .collect::<Result<Vec<_>, _>>()?;
            MathNode::row(parts).expect("row keeps its children")
        }
        MathNode::Frac(n, d) => MathNode::frac(expand_all(n, table)?, expand_all(d, table)?),
        MathNode::Script { base, sub, sup } => MathNode::script(
            expand_all(base, table)?,
            sub.as_deref().map(|s| expand_all(s, table)).transpose()?,
            sup.as_deref().map(|s| expand_all(s, table)).transpose()?,
        ),
        MathNode::Fenced { open, close, body } => {
            MathNode::fenced(open.clone(), close.clone(), expand_all(body, table)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const JACOBI: &str = "\
[macro]
name = JacobiP
params = 3
args = 1
category = orthogonal-polynomial
display = P^{($1,$2)}_{$3}\\left($4\\right)
url = http://dlmf.nist.gov/18.3
mathematica = JacobiP[$3,$1,$2,$4]
maple = JacobiP($3,$1,$2,$4)
sage = jacobi_P($3,$1,$2,$4)
";

    #[test]
    fn loads_single_block() {
        let table = load_dictionary(JACOBI).unwrap();
        assert_eq!(table.len(), 1);
        let m = table.lookup("JacobiP").unwrap();
        assert_eq!((m.params, m.args), (3, 1));
        assert_eq!(m.category, Category::OrthogonalPolynomial);
        assert_eq!(m.cas_template(CasTarget::Sage), Some("jacobi_P($3,$1,$2,$4)"));
    }

    #[test]
    fn duplicate_macro() {
        let text = format!("{JACOBI}\n{JACOBI}");
        assert_eq!(
            load_dictionary(&text),
            Err(DictError::DuplicateMacro("JacobiP".into()))
        );
    }

    #[test]
    fn placeholder_out_of_range() {
        let text = JACOBI.replace("\\left($4\\right)", "\\left($5\\right)");
        assert_eq!(
            load_dictionary(&text),
            Err(DictError::BadPlaceholder {
                name: "JacobiP".into(),
                index: 5
            })
        );
        let text = JACOBI.replace("JacobiP[$3", "JacobiP[$0");
        assert!(matches!(
            load_dictionary(&text),
            Err(DictError::BadPlaceholder { index: 0, .. })
        ));
    }

    #[test]
    fn missing_field() {
        let text = JACOBI.replace("url = http://dlmf.nist.gov/18.3\n", "");
        assert_eq!(
            load_dictionary(&text),
            Err(DictError::MissingField {
                name: "JacobiP".into(),
                field: "url"
            })
        );
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(
            load_dictionary("name = x\n"),
            Err(DictError::MalformedBlock { line: 1, .. })
        ));
        let text = JACOBI.replace("params = 3", "params three");
        assert!(matches!(
            load_dictionary(&text),
            Err(DictError::MalformedBlock { line: 3, .. })
        ));
        let text = JACOBI.replace("name = JacobiP", "name = alpha");
        assert!(matches!(load_dictionary(&text), Err(DictError::MalformedBlock { .. })));
        let text = JACOBI.replace("sage", "maxima");
        assert!(matches!(load_dictionary(&text), Err(DictError::MalformedBlock { .. })));
    }

    #[test]
    fn bad_display() {
        let text = JACOBI.replace("display = P^{($1,$2)}", "display = P^{($1,$2}");
        assert!(matches!(load_dictionary(&text), Err(DictError::BadDisplay { .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = format!("# dictionary\n\n{}\n\n# end\n", JACOBI);
        assert_eq!(load_dictionary(&text).unwrap().len(), 1);
    }

    #[test]
    fn lookup_is_case_sensitive() {
        let table = load_dictionary(JACOBI).unwrap();
        assert!(table.lookup("JacobiP").is_some());
        assert!(table.lookup("jacobip").is_none());
        assert!(MacroTable::default().lookup("JacobiP").is_none());
    }

    #[test]
    fn reserialize_round_trip() {
        let table = load_dictionary(JACOBI).unwrap();
        assert_eq!(load_dictionary(&table.to_text()).unwrap(), table);
    }

    #[test]
    fn substitution() {
        let vals: Vec<String> = ["a", "b"].iter().map(|s| s.to_string()).collect();
        assert_eq!(substitute("f($2,$1)", &vals), "f(b,a)");
        assert_eq!(placeholders("$1+$12-$"), vec![1, 12, 0]);
    }

    #[test]
    fn expand_jacobi() {
        let table = load_dictionary(JACOBI).unwrap();
        let app = parse_str("\\JacobiP{a}{b}{n}@{x}", &table).unwrap();
        let expanded = expand_display(&app, &table).unwrap();
        let expected = parse_str("P^{(a,b)}_{n}\\left(x\\right)", &MacroTable::default()).unwrap();
        assert_eq!(expanded, expected);
    }

    #[test]
    fn expand_fraction_operand() {
        let table = load_dictionary(JACOBI).unwrap();
        let app = parse_str("\\JacobiP{a}{b}{n}@{\\frac{1}{2}}", &table).unwrap();
        let expanded = expand_display(&app, &table).unwrap();
        assert_eq!(canonical(&expanded), "P^{(a,b)}_{n}\\left(\\frac{1}{2}\\right)");
    }

    #[test]
    fn expand_nested_and_unknown() {
        let table = load_dictionary(JACOBI).unwrap();
        let app = parse_str("\\JacobiP{a}{b}{n}@{\\JacobiP{c}{d}{m}@{y}}", &table).unwrap();
        let expanded = expand_display(&app, &table).unwrap();
        assert!(expanded.macro_names().is_empty());
        let unknown = MathNode::apply("Unknown", vec![], vec![MathNode::sym("x")]);
        assert_eq!(
            expand_display(&unknown, &table),
            Err(ExpandError::UnknownMacro("Unknown".into()))
        );
    }
}
