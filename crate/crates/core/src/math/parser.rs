use thiserror::Error;

use super::ast::{is_greek, MathNode, OpClass};
use super::lexer::{tokenize, LexError, Token, TokenKind};
use crate::macros::MacroTable;

/// Parse failures. Positions are token indices.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error("\\{name} expects {params} braced parameter(s){} but found {found} group(s)",
        if *args > 0 { format!(", @ and {args} braced argument(s)") } else { String::new() })]
    Arity {
        name: String,
        params: usize,
        args: usize,
        found: usize,
    },
    #[error("unknown control sequence \\{0}")]
    UnknownControlSequence(String),
    #[error("unbalanced group at token {0}")]
    UnbalancedGroup(usize),
    #[error("script without base or operand at token {0}")]
    DanglingScript(usize),
    #[error("second script of the same kind at token {0}")]
    DoubleScript(usize),
    #[error("expression ends with an operator at token {0}")]
    DanglingOperator(usize),
    #[error("empty group or expression at token {0}")]
    Empty(usize),
    #[error("invalid fence delimiter at token {0}")]
    BadDelimiter(usize),
    #[error("unexpected token at {0}")]
    UnexpectedToken(usize),
}

/// Parses a token stream into a single expression. Control sequences must be
/// built in (`frac`, `left`, `right`, Greek letters) or declared in `macros`.
pub fn parse(tokens: &[Token], macros: &MacroTable) -> Result<MathNode, ParseError> {
    let mut parser = Parser {
        tokens,
        pos: 0,
        macros,
    };
    let items = parser.sequence(Stop::End, 0)?;
    if let Some(MathNode::Op { class, .. }) = items.last() {
        if *class != OpClass::Other {
            return Err(ParseError::DanglingOperator(tokens.len()));
        }
    }
    MathNode::row(items).ok_or(ParseError::Empty(0))
}

/// Tokenizes and parses in one step.
pub fn parse_str(source: &str, macros: &MacroTable) -> Result<MathNode, ParseError> {
    parse(&tokenize(source)?, macros)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    End,
    Group,
    Right,
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    macros: &'a MacroTable,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let tok = self.tokens.get(self.pos);
        self.pos += 1;
        tok
    }

    /// Parses script units until `stop`. The terminating token is left for the
    /// caller. `opened_at` locates the opening token for error reporting.
    fn sequence(&mut self, stop: Stop, opened_at: usize) -> Result<Vec<MathNode>, ParseError> {
        let mut items = Vec::new();
        let mut brackets: Vec<(usize, &str)> = Vec::new();
        loop {
            let Some(tok) = self.peek() else {
                if stop == Stop::End {
                    break;
                }
                return Err(ParseError::UnbalancedGroup(opened_at));
            };
            match tok.kind {
                TokenKind::Close => {
                    if stop == Stop::Group {
                        break;
                    }
                    return Err(ParseError::UnbalancedGroup(self.pos));
                }
                TokenKind::Ctrl if tok.text == "right" => {
                    if stop == Stop::Right {
                        break;
                    }
                    return Err(ParseError::UnbalancedGroup(self.pos));
                }
                TokenKind::Sub | TokenKind::Sup => {
                    return Err(ParseError::DanglingScript(self.pos));
                }
                TokenKind::LeftFence => brackets.push((self.pos, tok.text.as_str())),
                TokenKind::RightFence => {
                    let expected = if tok.text == ")" { "(" } else { "[" };
                    match brackets.pop() {
                        Some((_, open)) if open == expected => {}
                        _ => return Err(ParseError::UnbalancedGroup(self.pos)),
                    }
                }
                _ => {}
            }
            items.push(self.script_unit()?);
        }
        if let Some(&(pos, _)) = brackets.first() {
            return Err(ParseError::UnbalancedGroup(pos));
        }
        Ok(items)
    }

    fn script_unit(&mut self) -> Result<MathNode, ParseError> {
        let base = self.atom()?;
        let mut sub = None;
        let mut sup = None;
        while let Some(tok) = self.peek() {
            let slot = match tok.kind {
                TokenKind::Sub => &mut sub,
                TokenKind::Sup => &mut sup,
                _ => break,
            };
            let at = self.pos;
            if slot.is_some() {
                return Err(ParseError::DoubleScript(at));
            }
            self.pos += 1;
            let operand = match self.peek() {
                Some(t) if t.kind == TokenKind::Open => self.group()?,
                Some(t) if matches!(t.kind, TokenKind::Letter | TokenKind::Digit) => {
                    self.atom()?
                }
                Some(t) if t.kind == TokenKind::Ctrl && is_greek(&t.text) => self.atom()?,
                _ => return Err(ParseError::DanglingScript(at)),
            };
            *slot = Some(operand);
        }
        if sub.is_none() && sup.is_none() {
            Ok(base)
        } else {
            Ok(MathNode::script(base, sub, sup))
        }
    }

    /// A braced group; the content must be non-empty.
    fn group(&mut self) -> Result<MathNode, ParseError> {
        let open = self.pos;
        match self.bump() {
            Some(t) if t.kind == TokenKind::Open => {}
            _ => return Err(ParseError::UnexpectedToken(open)),
        }
        let items = self.sequence(Stop::Group, open)?;
        self.pos += 1; // the closing brace
        MathNode::row(items).ok_or(ParseError::Empty(open))
    }

    fn atom(&mut self) -> Result<MathNode, ParseError> {
        let at = self.pos;
        let Some(tok) = self.peek() else {
            return Err(ParseError::UnexpectedToken(at));
        };
        match tok.kind {
            TokenKind::Letter => {
                self.pos += 1;
                Ok(MathNode::sym(tok.text.clone()))
            }
            TokenKind::Digit => {
                self.pos += 1;
                Ok(MathNode::num(tok.text.clone()))
            }
            TokenKind::Op | TokenKind::LeftFence | TokenKind::RightFence => {
                self.pos += 1;
                Ok(MathNode::op(tok.text.clone()))
            }
            TokenKind::Open => self.group(),
            TokenKind::Ctrl => {
                self.pos += 1;
                self.control(&tok.text, at)
            }
            TokenKind::Close => Err(ParseError::UnbalancedGroup(at)),
            TokenKind::Sub | TokenKind::Sup => Err(ParseError::DanglingScript(at)),
            TokenKind::At => Err(ParseError::UnexpectedToken(at)),
        }
    }

    fn control(&mut self, name: &str, at: usize) -> Result<MathNode, ParseError> {
        match name {
            "frac" => {
                let mut parts = Vec::with_capacity(2);
                for found in 0..2 {
                    if !self.at_kind(TokenKind::Open) {
                        return Err(ParseError::Arity {
                            name: name.to_string(),
                            params: 2,
                            args: 0,
                            found,
                        });
                    }
                    parts.push(self.group()?);
                }
                let den = parts.pop().unwrap();
                let num = parts.pop().unwrap();
                Ok(MathNode::frac(num, den))
            }
            "left" => {
                let open = self.delimiter()?;
                let items = self.sequence(Stop::Right, at)?;
                let right_at = self.pos;
                self.pos += 1; // \right
                let close = self.delimiter()?;
                let body = MathNode::row(items).ok_or(ParseError::Empty(right_at))?;
                Ok(MathNode::fenced(open, close, body))
            }
            "right" => Err(ParseError::UnbalancedGroup(at)),
            _ if is_greek(name) => Ok(MathNode::sym(name)),
            _ => {
                let Some(entry) = self.macros.lookup(name) else {
                    return Err(ParseError::UnknownControlSequence(name.to_string()));
                };
                let arity_error = |found| ParseError::Arity {
                    name: name.to_string(),
                    params: entry.params,
                    args: entry.args,
                    found,
                };
                let mut params = Vec::with_capacity(entry.params);
                for found in 0..entry.params {
                    if !self.at_kind(TokenKind::Open) {
                        return Err(arity_error(found));
                    }
                    params.push(self.group()?);
                }
                let mut args = Vec::with_capacity(entry.args);
                if entry.args > 0 {
                    if !self.at_kind(TokenKind::At) {
                        return Err(arity_error(entry.params));
                    }
                    self.pos += 1;
                    for j in 0..entry.args {
                        if !self.at_kind(TokenKind::Open) {
                            return Err(arity_error(entry.params + j));
                        }
                        args.push(self.group()?);
                    }
                }
                Ok(MathNode::apply(name, params, args))
            }
        }
    }

    fn at_kind(&self, kind: TokenKind) -> bool {
        self.peek().is_some_and(|t| t.kind == kind)
    }

    fn delimiter(&mut self) -> Result<String, ParseError> {
        let at = self.pos;
        match self.bump() {
            Some(t)
                if matches!(t.kind, TokenKind::LeftFence | TokenKind::RightFence)
                    || t.is(TokenKind::Op, "|") =>
            {
                Ok(t.text.clone())
            }
            _ => Err(ParseError::BadDelimiter(at)),
        }
    }
}
