//! Rule-driven rewriting of plain LaTeX into semantic-macro LaTeX.
//!
//! A rule file holds one rule per line, `pattern -> replacement`, where both
//! sides are math token sequences that may contain the slots `#1`..`#9`.
//! Matching follows TeX's parameter conventions: a slot followed by a literal
//! is delimited by that literal, any other slot takes a single unit.

use thiserror::Error;

use crate::math::{detokenize, tokenize, LexError, Token, TokenKind};
use crate::pages::seed::{rewrite_math_bodies, SeedError};

pub const DEFAULT_MAX_PASSES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleToken {
    Lit(Token),
    Slot(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacementRule {
    pub pattern: Vec<RuleToken>,
    pub replacement: Vec<RuleToken>,
    pub line: usize,
}

impl ReplacementRule {
    pub fn slots(&self) -> Vec<usize> {
        let mut slots: Vec<usize> = slot_indices(&self.pattern).collect();
        slots.sort_unstable();
        slots.dedup();
        slots
    }
}

fn slot_indices(tokens: &[RuleToken]) -> impl Iterator<Item = usize> + '_ {
    tokens.iter().filter_map(|t| match t {
        RuleToken::Slot(k) => Some(*k),
        RuleToken::Lit(_) => None,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<ReplacementRule>,
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Application {
    pub pass: usize,
    /// Index of the rule in file order.
    pub rule: usize,
    /// Token index in the input of that pass.
    pub position: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewriteReport {
    pub passes: usize,
    pub applications: Vec<Application>,
    pub reached_fixpoint: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplaceError {
    #[error("rule on line {line}: {detail}")]
    BadRule { line: usize, detail: String },
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("no fixpoint after {0} passes")]
    NoFixpoint(usize),
    #[error(transparent)]
    Seed(#[from] SeedError),
}

fn bad_rule(line: usize, detail: impl Into<String>) -> ReplaceError {
    ReplaceError::BadRule {
        line,
        detail: detail.into(),
    }
}

/// Parses a rule file. Blank lines and lines starting with `#` (not followed
/// by a digit) are ignored.
pub fn load_rules(text: &str) -> Result<RuleSet, ReplaceError> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || is_comment(trimmed) {
            continue;
        }
        let (lhs, rhs) = trimmed
            .split_once("->")
            .ok_or_else(|| bad_rule(line, "missing \"->\""))?;
        let pattern = rule_tokens(lhs, line)?;
        let replacement = rule_tokens(rhs, line)?;
        if !pattern.iter().any(|t| matches!(t, RuleToken::Lit(_))) {
            return Err(bad_rule(line, "pattern has no literal token"));
        }
        let bound: Vec<usize> = slot_indices(&pattern).collect();
        if let Some(k) = slot_indices(&replacement).find(|k| !bound.contains(k)) {
            return Err(bad_rule(line, format!("#{k} is not bound by the pattern")));
        }
        rules.push(ReplacementRule {
            pattern,
            replacement,
            line,
        });
    }
    Ok(RuleSet { rules })
}

fn is_comment(line: &str) -> bool {
    let mut chars = line.chars();
    chars.next() == Some('#') && !chars.next().is_some_and(|c| c.is_ascii_digit())
}

fn rule_tokens(side: &str, line: usize) -> Result<Vec<RuleToken>, ReplaceError> {
    let mut out = Vec::new();
    let mut rest = side;
    while let Some(hash) = rest.find('#') {
        push_literals(&mut out, &rest[..hash], line)?;
        let after = &rest[hash + 1..];
        let k = after
            .chars()
            .next()
            .and_then(|c| c.to_digit(10))
            .ok_or_else(|| bad_rule(line, "\"#\" must be followed by a slot number"))?;
        if k == 0 {
            return Err(bad_rule(line, "slot #0"));
        }
        out.push(RuleToken::Slot(k as usize));
        rest = &after[1..];
    }
    push_literals(&mut out, rest, line)?;
    Ok(out)
}

fn push_literals(out: &mut Vec<RuleToken>, text: &str, line: usize) -> Result<(), ReplaceError> {
    let tokens = tokenize(text).map_err(|e| bad_rule(line, e.to_string()))?;
    out.extend(tokens.into_iter().map(RuleToken::Lit));
    Ok(())
}

type Captures = [Option<Vec<Token>>; 10];

fn match_at(pattern: &[RuleToken], tokens: &[Token], start: usize) -> Option<(usize, Captures)> {
    let mut caps: Captures = Default::default();
    let mut pos = start;
    for (i, item) in pattern.iter().enumerate() {
        match item {
            RuleToken::Lit(t) => {
                if tokens.get(pos) != Some(t) {
                    return None;
                }
                pos += 1;
            }
            RuleToken::Slot(k) => {
                let (value, next) = match pattern.get(i + 1) {
                    Some(RuleToken::Lit(delim)) => delimited(tokens, pos, delim)?,
                    _ => undelimited(tokens, pos)?,
                };
                match &caps[*k] {
                    Some(prev) if *prev != value => return None,
                    _ => caps[*k] = Some(value),
                }
                pos = next;
            }
        }
    }
    Some((pos, caps))
}

fn pairs(open: &Token, close: &Token) -> bool {
    matches!(
        (open.text.as_str(), close.text.as_str()),
        ("{", "}") | ("(", ")") | ("[", "]")
    )
}

/// Shortest non-empty balanced run starting at `pos` that is followed by
/// `delim` at depth zero. Returns the capture and the index of the delimiter.
fn delimited(tokens: &[Token], pos: usize, delim: &Token) -> Option<(Vec<Token>, usize)> {
    let mut stack: Vec<&Token> = Vec::new();
    for j in pos..tokens.len() {
        let t = &tokens[j];
        if stack.is_empty() && j > pos && t == delim {
            return Some((strip_group(&tokens[pos..j]), j));
        }
        if t.opens() {
            stack.push(t);
        } else if t.closes() {
            match stack.pop() {
                Some(open) if pairs(open, t) => {}
                _ => return None,
            }
        }
    }
    None
}

/// One token, or one brace group with its braces removed.
fn undelimited(tokens: &[Token], pos: usize) -> Option<(Vec<Token>, usize)> {
    let t = tokens.get(pos)?;
    match t.kind {
        TokenKind::Open => {
            let end = group_end(tokens, pos)?;
            Some((tokens[pos + 1..end].to_vec(), end + 1))
        }
        TokenKind::Close | TokenKind::LeftFence | TokenKind::RightFence => None,
        _ => Some((vec![t.clone()], pos + 1)),
    }
}

/// Index of the `}` matching the `{` at `open`.
fn group_end(tokens: &[Token], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, t) in tokens.iter().enumerate().skip(open) {
        match t.kind {
            TokenKind::Open => depth += 1,
            TokenKind::Close => {
                depth -= 1;
                if depth == 0 {
                    return Some(j);
                }
            }
            _ => {}
        }
    }
    None
}

fn strip_group(run: &[Token]) -> Vec<Token> {
    if run.len() >= 2 && run[0].kind == TokenKind::Open && group_end(run, 0) == Some(run.len() - 1) {
        run[1..run.len() - 1].to_vec()
    } else {
        run.to_vec()
    }
}

fn instantiate(replacement: &[RuleToken], caps: &Captures, out: &mut Vec<Token>) {
    for item in replacement {
        match item {
            RuleToken::Lit(t) => out.push(t.clone()),
            RuleToken::Slot(k) => out.extend(caps[*k].iter().flatten().cloned()),
        }
    }
}

/// One left-to-right pass. Returns the new tokens and `(rule, position)` for
/// every application; replacements are not rescanned within the pass.
pub fn rewrite_pass(tokens: &[Token], rules: &RuleSet) -> (Vec<Token>, Vec<(usize, usize)>) {
    let mut out = Vec::with_capacity(tokens.len());
    let mut applied = Vec::new();
    let mut pos = 0;
    'scan: while pos < tokens.len() {
        for (r, rule) in rules.rules.iter().enumerate() {
            if let Some((end, caps)) = match_at(&rule.pattern, tokens, pos) {
                instantiate(&rule.replacement, &caps, &mut out);
                applied.push((r, pos));
                pos = end.max(pos + 1);
                continue 'scan;
            }
        }
        out.push(tokens[pos].clone());
        pos += 1;
    }
    (out, applied)
}

/// Applies passes until one makes no change. The pass that confirms the
/// fixpoint is counted in `passes`.
pub fn rewrite_to_fixpoint(
    source: &str,
    rules: &RuleSet,
    max_passes: usize,
) -> Result<(String, RewriteReport), ReplaceError> {
    let mut tokens = tokenize(source)?;
    let mut report = RewriteReport::default();
    for pass in 1..=max_passes {
        let (next, applied) = rewrite_pass(&tokens, rules);
        report.passes = pass;
        if applied.is_empty() {
            report.reached_fixpoint = true;
            return Ok((detokenize(&tokens), report));
        }
        report
            .applications
            .extend(applied.into_iter().map(|(rule, position)| Application { pass, rule, position }));
        // Re-lexing merges digit tokens that a splice placed side by side.
        tokens = tokenize(&detokenize(&next))?;
    }
    Err(ReplaceError::NoFixpoint(max_passes))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BodyReport {
    /// Entry label for seed input, line number for line-per-formula input.
    pub source: String,
    pub tag: String,
    pub report: RewriteReport,
}

/// Rewrites every math body of a document. Seed files keep their layout and
/// only formula, constraint and substitution bodies change; any other text
/// is treated as one formula per non-blank line.
pub fn rewrite_document(
    text: &str,
    rules: &RuleSet,
    max_passes: usize,
) -> Result<(String, Vec<BodyReport>), ReplaceError> {
    let mut reports = Vec::new();
    if text.contains("\\begin{drmf:formula}") {
        let out = rewrite_math_bodies(text, |label, tag, body| {
            let (rewritten, report) = rewrite_to_fixpoint(body, rules, max_passes)?;
            reports.push(BodyReport {
                source: label.to_string(),
                tag: tag.to_string(),
                report,
            });
            Ok::<_, ReplaceError>(rewritten)
        })??;
        return Ok((out, reports));
    }
    let mut out = String::with_capacity(text.len());
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            out.push_str(line);
        } else {
            let (rewritten, report) = rewrite_to_fixpoint(line, rules, max_passes)?;
            out.push_str(&rewritten);
            reports.push(BodyReport {
                source: (idx + 1).to_string(),
                tag: "formula".to_string(),
                report,
            });
        }
        out.push('\n');
    }
    Ok((out, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    const JACOBI: &str = "P_{#1}^{(#2,#3)}(#4) -> \\JacobiP{#2}{#3}{#1}@{#4}";

    fn run(rules: &str, src: &str) -> Result<(String, RewriteReport), ReplaceError> {
        rewrite_to_fixpoint(src, &load_rules(rules).unwrap(), DEFAULT_MAX_PASSES)
    }

    #[test]
    fn load_examples() {
        let set = load_rules(JACOBI).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.rules[0].slots(), vec![1, 2, 3, 4]);

        let del = load_rules("x -> ").unwrap();
        assert!(del.rules[0].replacement.is_empty());

        assert!(matches!(load_rules("#1 -> #1"), Err(ReplaceError::BadRule { line: 1, .. })));
    }

    #[test]
    fn bad_rules() {
        for text in ["a b", "a#0 -> a", "a#x -> a", "a#1 -> #2", "a -> \\"] {
            assert!(
                matches!(load_rules(text), Err(ReplaceError::BadRule { line: 1, .. })),
                "{text}"
            );
        }
        assert!(matches!(
            load_rules("# comment\n\nx -> y\nbroken"),
            Err(ReplaceError::BadRule { line: 4, .. })
        ));
    }

    #[test]
    fn comments_and_slot_lines() {
        let set = load_rules("# header\n#1+0 -> #1\n").unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn jacobi_hand_trace() {
        let (out, report) = run(JACOBI, "P_{n}^{(a,b)}(x)").unwrap();
        assert_eq!(out, "\\JacobiP{a}{b}{n}@{x}");
        assert_eq!(report.passes, 2);
        assert!(report.reached_fixpoint);
        assert_eq!(report.applications, vec![Application { pass: 1, rule: 0, position: 0 }]);
    }

    #[test]
    fn leading_literal_absent() {
        let (out, report) = run(JACOBI, "Q_{n}(x)").unwrap();
        assert_eq!(out, "Q_{n}(x)");
        assert!(report.applications.is_empty());
        assert_eq!(report.passes, 1);
    }

    #[test]
    fn strictly_growing_rule() {
        let rules = load_rules("x -> xx").unwrap();
        assert_eq!(rewrite_to_fixpoint("x", &rules, 3), Err(ReplaceError::NoFixpoint(3)));
    }

    #[test]
    fn delimited_capture_is_balanced() {
        let (out, _) = run(JACOBI, "P_{n}^{(a,b)}((1-x)/2)").unwrap();
        assert_eq!(out, "\\JacobiP{a}{b}{n}@{(1-x)/2}");
        let (out, _) = run("f(#1,#2) -> g{#1}{#2}", "f(h(a,b),c)").unwrap();
        assert_eq!(out, "g{h(a,b)}{c}");
    }

    #[test]
    fn undelimited_slot_takes_one_unit() {
        let (out, _) = run("e^#1 -> \\expe{#1}", "e^{x+1}y").unwrap();
        assert_eq!(out, "\\expe{x+1}y");
        let (out, _) = run("e^#1 -> \\expe{#1}", "e^xy").unwrap();
        assert_eq!(out, "\\expe{x}y");
    }

    #[test]
    fn repeated_slot_must_agree() {
        let (out, _) = run("#1-#1 -> 0", "a-a+b-c").unwrap();
        assert_eq!(out, "0+b-c");
    }

    #[test]
    fn leftmost_then_file_order() {
        let (out, report) = run("ab -> X\nb -> Y\na -> Z", "ab").unwrap();
        assert_eq!(out, "X");
        assert_eq!(report.applications[0].rule, 0);
        let (out, _) = run("b -> Y\nab -> X", "ab").unwrap();
        assert_eq!(out, "X");
    }

    #[test]
    fn replacement_not_rescanned_in_pass() {
        let rules = load_rules("a -> aa").unwrap();
        let (tokens, applied) = rewrite_pass(&tokenize("ab").unwrap(), &rules);
        assert_eq!(detokenize(&tokens), "aab");
        assert_eq!(applied, vec![(0, 0)]);
    }

    #[test]
    fn nested_needs_two_rewriting_passes() {
        let rules = "\\Gamma(#1) -> \\EulerGamma@{#1}";
        let (out, report) = run(rules, "\\Gamma(\\Gamma(x))").unwrap();
        assert_eq!(out, "\\EulerGamma@{\\EulerGamma@{x}}");
        assert_eq!(report.passes, 3);
    }

    #[test]
    fn seed_document_bodies() {
        let text = "\\begin{drmf:formula}\n\\label{a}\n\\formula{\\Gamma(x)}\n\\cite{K}\n\\end{drmf:formula}\n";
        let rules = load_rules("\\Gamma(#1) -> \\EulerGamma@{#1}").unwrap();
        let (out, reports) = rewrite_document(text, &rules, 10).unwrap();
        assert!(out.contains("\\formula{\\EulerGamma@{x}}"));
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].source, "a");
    }

    #[test]
    fn line_document() {
        let rules = load_rules("\\Gamma(#1) -> \\EulerGamma@{#1}").unwrap();
        let (out, reports) = rewrite_document("\\Gamma(x)\n\ny\n", &rules, 10).unwrap();
        assert_eq!(out, "\\EulerGamma@{x}\n\ny\n");
        assert_eq!(reports.len(), 2);
    }
}
