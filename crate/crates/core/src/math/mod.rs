//! LaTeX math subset: tokens, syntax tree, parser, canonical form and subterm
//! enumeration. Semantic macros are parsed into [`MathNode::Apply`] nodes using
//! the arities declared in a [`MacroTable`](crate::macros::MacroTable).

#[cfg(any(test, feature = "proptest"))]
pub mod arbitrary;
mod ast;
mod canonical;
mod lexer;
mod parser;
mod subterms;

pub use ast::{greek_letter, greek_names, is_builtin, is_greek, MathNode, OpClass};
pub use canonical::canonical;
pub use lexer::{detokenize, tokenize, LexError, Token, TokenKind};
pub use parser::{parse, parse_str, ParseError};
pub use subterms::{contains_subterm, enumerate_subterms};
