use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Letter,
    Digit,
    Op,
    /// A control sequence; the text holds the name without the backslash.
    Ctrl,
    /// `{`
    Open,
    /// `}`
    Close,
    /// `(` or `[`
    LeftFence,
    /// `)` or `]`
    RightFence,
    Sub,
    Sup,
    At,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
}

impl Token {
    pub fn new(kind: TokenKind, text: impl Into<String>) -> Self {
        Token {
            kind,
            text: text.into(),
        }
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    /// Opening delimiter for balance tracking: `{`, `(` or `[`.
    pub fn opens(&self) -> bool {
        matches!(self.kind, TokenKind::Open | TokenKind::LeftFence)
    }

    pub fn closes(&self) -> bool {
        matches!(self.kind, TokenKind::Close | TokenKind::RightFence)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            TokenKind::Ctrl => write!(f, "\\{}", self.text),
            _ => f.write_str(&self.text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unexpected character {character:?} at offset {position}")]
pub struct LexError {
    pub position: usize,
    pub character: char,
}

const OPERATORS: &str = "+-=,./!<>|";

/// Splits a LaTeX math string into tokens. Whitespace is dropped; digit runs
/// become a single token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    let mut chars = source.char_indices().peekable();

    while let Some((pos, c)) = chars.next() {
        let token = match c {
            c if c.is_whitespace() => continue,
            'a'..='z' | 'A'..='Z' => Token::new(TokenKind::Letter, c.to_string()),
            '0'..='9' => {
                let mut run = c.to_string();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_digit() {
                        break;
                    }
                    run.push(d);
                    chars.next();
                }
                Token::new(TokenKind::Digit, run)
            }
            '\\' => {
                let mut name = String::new();
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_alphabetic() {
                        break;
                    }
                    name.push(d);
                    chars.next();
                }
                if name.is_empty() {
                    return Err(LexError {
                        position: pos,
                        character: '\\',
                    });
                }
                Token::new(TokenKind::Ctrl, name)
            }
            '{' => Token::new(TokenKind::Open, "{"),
            '}' => Token::new(TokenKind::Close, "}"),
            '(' | '[' => Token::new(TokenKind::LeftFence, c.to_string()),
            ')' | ']' => Token::new(TokenKind::RightFence, c.to_string()),
            '_' => Token::new(TokenKind::Sub, "_"),
            '^' => Token::new(TokenKind::Sup, "^"),
            '@' => Token::new(TokenKind::At, "@"),
            c if OPERATORS.contains(c) => Token::new(TokenKind::Op, c.to_string()),
            other => {
                return Err(LexError {
                    position: pos,
                    character: other,
                })
            }
        };
        tokens.push(token);
    }
    Ok(tokens)
}

/// Joins tokens back into source text. The only space emitted is the one
/// needed to end a control word before a letter.
pub fn detokenize(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut after_control_word = false;
    for token in tokens {
        if after_control_word && token.kind == TokenKind::Letter {
            out.push(' ');
        }
        match token.kind {
            TokenKind::Ctrl => {
                out.push('\\');
                out.push_str(&token.text);
            }
            _ => out.push_str(&token.text),
        }
        after_control_word = token.kind == TokenKind::Ctrl;
    }
    out
}
