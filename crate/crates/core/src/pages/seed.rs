//! Seed files (`.fseed`).
//!
//! ```text
//! \begin{drmf:formula}
//! \label{DLMF:5.5.1}
//! \formula{\EulerGamma@{z+1}=z\EulerGamma@{z}}
//! \cite{DLMF}
//! \note{recurrence relation}
//! \end{drmf:formula}
//! ```
//!
//! One tag per line. A tag body may continue over several lines until its
//! braces balance. `%` starts a comment line.

use std::collections::HashSet;
use std::ops::Range;

use thiserror::Error;

const BEGIN: &str = "\\begin{drmf:formula}";
const END: &str = "\\end{drmf:formula}";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedEntry {
    pub label: String,
    pub formula_tex: String,
    pub constraints: Vec<String>,
    pub substitutions: Vec<String>,
    pub cites: Vec<String>,
    pub proofs: Vec<String>,
    pub notes: Vec<String>,
    pub links: Vec<String>,
    /// Line of the opening `\begin`.
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("line {line}: {detail}")]
    MalformedBlock { line: usize, detail: String },
    #[error("entry {0} has no \\formula")]
    MissingFormula(String),
    #[error("label {0} is used more than once")]
    DuplicateLabel(String),
    #[error("line {0}: unknown tag")]
    UnknownTag(usize),
}

fn malformed(line: usize, detail: impl Into<String>) -> SeedError {
    SeedError::MalformedBlock {
        line,
        detail: detail.into(),
    }
}

/// Tag kinds that carry math.
pub const MATH_TAGS: [&str; 3] = ["formula", "constraint", "substitution"];
const TAGS: [&str; 8] = [
    "label",
    "formula",
    "constraint",
    "substitution",
    "cite",
    "proof",
    "note",
    "link",
];

pub fn is_valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, ':' | '.' | '-'))
}

#[derive(Debug)]
struct RawTag {
    name: String,
    line: usize,
    /// Byte range of the body between the outer braces.
    span: Range<usize>,
}

#[derive(Debug)]
struct RawBlock {
    line: usize,
    tags: Vec<RawTag>,
}

pub fn parse_seed(text: &str) -> Result<Vec<SeedEntry>, SeedError> {
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for block in scan(text)? {
        let entry = assemble(text, &block)?;
        if !seen.insert(entry.label.clone()) {
            return Err(SeedError::DuplicateLabel(entry.label));
        }
        entries.push(entry);
    }
    Ok(entries)
}

/// Rewrites every math body (`\formula`, `\constraint`, `\substitution`) in
/// place, leaving the rest of the file byte-for-byte intact. The callback
/// receives the entry label, the tag name and the trimmed body.
pub fn rewrite_math_bodies<E>(
    text: &str,
    mut f: impl FnMut(&str, &str, &str) -> Result<String, E>,
) -> Result<Result<String, E>, SeedError> {
    let blocks = scan(text)?;
    let mut edits = Vec::new();
    for block in &blocks {
        let label = block
            .tags
            .iter()
            .find(|t| t.name == "label")
            .map(|t| text[t.span.clone()].trim())
            .unwrap_or("");
        for tag in block.tags.iter().filter(|t| MATH_TAGS.contains(&t.name.as_str())) {
            match f(label, &tag.name, text[tag.span.clone()].trim()) {
                Ok(body) => edits.push((tag.span.clone(), body)),
                Err(e) => return Ok(Err(e)),
            }
        }
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for (span, body) in edits {
        out.push_str(&text[last..span.start]);
        out.push_str(&body);
        last = span.end;
    }
    out.push_str(&text[last..]);
    Ok(Ok(out))
}

fn assemble(text: &str, block: &RawBlock) -> Result<SeedEntry, SeedError> {
    let mut entry = SeedEntry {
        line: block.line,
        ..Default::default()
    };
    let mut label = None;
    let mut formula = None;
    for tag in &block.tags {
        let body = text[tag.span.clone()].trim().to_string();
        match tag.name.as_str() {
            "label" => {
                if label.is_some() {
                    return Err(malformed(tag.line, "second \\label in one entry"));
                }
                if !is_valid_label(&body) {
                    return Err(malformed(tag.line, format!("invalid label {body:?}")));
                }
                label = Some(body);
            }
            "formula" => {
                if formula.is_some() {
                    return Err(malformed(tag.line, "second \\formula in one entry"));
                }
                formula = Some(body);
            }
            "constraint" => entry.constraints.push(body),
            "substitution" => entry.substitutions.push(body),
            "cite" => {
                for key in body.split(',').map(str::trim) {
                    if key.is_empty() {
                        return Err(malformed(tag.line, "empty citation key"));
                    }
                    entry.cites.push(key.to_string());
                }
            }
            "proof" => entry.proofs.push(body),
            "note" => entry.notes.push(body),
            "link" => entry.links.push(body),
            _ => unreachable!("scan only accepts known tags"),
        }
    }
    entry.label = label.ok_or_else(|| malformed(block.line, "entry has no \\label"))?;
    entry.formula_tex = formula
        .filter(|f| !f.is_empty())
        .ok_or_else(|| SeedError::MissingFormula(entry.label.clone()))?;
    Ok(entry)
}

fn scan(text: &str) -> Result<Vec<RawBlock>, SeedError> {
    let mut blocks = Vec::new();
    let mut current: Option<RawBlock> = None;
    let mut pos = 0;
    let mut line = 1;

    while pos < text.len() {
        let line_end = text[pos..].find('\n').map_or(text.len(), |i| pos + i);
        let raw = &text[pos..line_end];
        let content = raw.trim();
        let indent = raw.len() - raw.trim_start().len();

        if content.is_empty() || content.starts_with('%') {
            // skip
        } else if content == BEGIN {
            if current.is_some() {
                return Err(malformed(line, "nested \\begin"));
            }
            current = Some(RawBlock { line, tags: Vec::new() });
        } else if content == END {
            let block = current.take().ok_or_else(|| malformed(line, "\\end without \\begin"))?;
            blocks.push(block);
        } else if let Some(block) = current.as_mut() {
            let (tag, next_pos, next_line) = read_tag(text, pos + indent, line)?;
            block.tags.push(tag);
            pos = next_pos;
            line = next_line;
            continue;
        } else {
            return Err(malformed(line, "content outside a formula block"));
        }
        pos = line_end + 1;
        line += 1;
    }
    if let Some(block) = current {
        return Err(malformed(block.line, "unterminated formula block"));
    }
    Ok(blocks)
}

/// Reads `\name{body}` starting at `start`. Returns the tag plus the byte
/// offset and line number of the following line.
fn read_tag(text: &str, start: usize, line: usize) -> Result<(RawTag, usize, usize), SeedError> {
    let rest = &text[start..];
    let Some(after_slash) = rest.strip_prefix('\\') else {
        return Err(malformed(line, "expected a tag"));
    };
    let name_len = after_slash.bytes().take_while(u8::is_ascii_alphabetic).count();
    let name = &after_slash[..name_len];
    if !TAGS.contains(&name) {
        return Err(SeedError::UnknownTag(line));
    }
    let open = start + 1 + name_len;
    if text.as_bytes().get(open) != Some(&b'{') {
        return Err(malformed(line, format!("\\{name} must be followed by '{{'")));
    }

    let body_start = open + 1;
    let mut depth = 0usize;
    let mut cur_line = line;
    let mut close = None;
    let mut chars = text[body_start..].char_indices();
    while let Some((i, c)) = chars.next() {
        match c {
            '\\' => {
                if let Some((_, '\n')) = chars.next() {
                    cur_line += 1;
                }
            }
            '\n' => cur_line += 1,
            '{' => depth += 1,
            '}' if depth == 0 => {
                close = Some(body_start + i);
                break;
            }
            '}' => depth -= 1,
            _ => {}
        }
    }
    let close = close.ok_or_else(|| malformed(line, format!("unbalanced braces in \\{name}")))?;

    let tail_end = text[close..].find('\n').map_or(text.len(), |i| close + i);
    if !text[close + 1..tail_end].trim().is_empty() {
        return Err(malformed(cur_line, "trailing text after tag"));
    }
    let tag = RawTag {
        name: name.to_string(),
        line,
        span: body_start..close,
    };
    Ok((tag, tail_end + 1, cur_line + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(body: &str) -> String {
        format!("{BEGIN}\n{body}\n{END}\n")
    }

    #[test]
    fn minimal_entry() {
        let text = block("\\label{A:1}\n\\formula{x+1}\n\\cite{KLS2010}");
        let entries = parse_seed(&text).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].label, "A:1");
        assert_eq!(entries[0].formula_tex, "x+1");
        assert_eq!(entries[0].cites, vec!["KLS2010"]);
        assert_eq!(entries[0].line, 1);
    }

    #[test]
    fn missing_formula() {
        let text = block("\\label{A:1}\n\\cite{K}");
        assert_eq!(parse_seed(&text), Err(SeedError::MissingFormula("A:1".into())));
    }

    #[test]
    fn two_cites() {
        let text = block("\\label{A}\n\\formula{x}\n\\cite{K1}\n\\cite{K2}");
        assert_eq!(parse_seed(&text).unwrap()[0].cites, vec!["K1", "K2"]);
    }

    #[test]
    fn multi_line_formula_and_comments() {
        let text = format!(
            "% header\n\n{BEGIN}\n  \\label{{A}}\n  % comment\n  \\formula{{\\frac{{1}}\n    {{2}}}}\n  \\note{{a {{braced}} note}}\n{END}\n"
        );
        let e = &parse_seed(&text).unwrap()[0];
        assert_eq!(e.formula_tex, "\\frac{1}\n    {2}");
        assert_eq!(e.notes, vec!["a {braced} note"]);
    }

    #[test]
    fn duplicate_label() {
        let text = format!("{}{}", block("\\label{A}\n\\formula{x}"), block("\\label{A}\n\\formula{y}"));
        assert_eq!(parse_seed(&text), Err(SeedError::DuplicateLabel("A".into())));
    }

    #[test]
    fn unknown_tag() {
        let text = block("\\label{A}\n\\formula{x}\n\\remark{hi}");
        assert_eq!(parse_seed(&text), Err(SeedError::UnknownTag(4)));
    }

    #[test]
    fn malformed_blocks() {
        assert!(matches!(parse_seed("stray\n"), Err(SeedError::MalformedBlock { line: 1, .. })));
        assert!(matches!(
            parse_seed(&format!("{BEGIN}\n\\label{{A}}\n")),
            Err(SeedError::MalformedBlock { line: 1, .. })
        ));
        assert!(matches!(
            parse_seed(&block("\\label{A}\n\\formula{x")),
            Err(SeedError::MalformedBlock { .. })
        ));
        assert!(matches!(
            parse_seed(&block("\\label{A B}\n\\formula{x}")),
            Err(SeedError::MalformedBlock { .. })
        ));
        assert!(matches!(
            parse_seed(&block("\\formula{x}")),
            Err(SeedError::MalformedBlock { .. })
        ));
        assert!(matches!(
            parse_seed(&block("\\label{A}\n\\formula{x} extra")),
            Err(SeedError::MalformedBlock { .. })
        ));
    }

    #[test]
    fn all_tags() {
        let text = block(
            "\\label{A}\n\\formula{x}\n\\constraint{x>0}\n\\substitution{y=x}\n\\cite{K}\n\\proof{trivial}\n\\note{n}\n\\link{http://example.org}",
        );
        let e = &parse_seed(&text).unwrap()[0];
        assert_eq!(e.constraints, vec!["x>0"]);
        assert_eq!(e.substitutions, vec!["y=x"]);
        assert_eq!(e.proofs, vec!["trivial"]);
        assert_eq!(e.links, vec!["http://example.org"]);
    }

    #[test]
    fn rewrite_keeps_surroundings() {
        let text = format!("% c\n{}", block("\\label{A}\n\\formula{ x }\n\\constraint{y}\n\\note{x}"));
        let out = rewrite_math_bodies(&text, |label, tag, body| {
            Ok::<_, ()>(format!("{label}/{tag}/{body}"))
        })
        .unwrap()
        .unwrap();
        assert!(out.contains("\\formula{A/formula/x}"));
        assert!(out.contains("\\constraint{A/constraint/y}"));
        assert!(out.contains("\\note{x}"));
        assert!(out.starts_with("% c\n"));
    }
}
