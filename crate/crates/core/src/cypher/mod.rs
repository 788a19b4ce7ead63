//! Lexer and recursive-descent parser for the supported Cypher subset.
//!
//! ```text
//! query    := CREATE pattern (',' pattern)*
//!           | MATCH pattern (',' pattern)* [WHERE cmp (AND cmp)*]
//!             RETURN proj (',' proj)* [LIMIT int]
//! pattern  := node (edge node)*
//! node     := '(' [var] [':' label] [props] ')'
//! edge     := '-' ['[' body ']'] '-' '>' | '<' '-' ['[' body ']'] '-'
//! body     := [var] [':' type] ['*' int ['..' int]] [props]
//! cmp      := operand op operand        op: = <> < <= > >=
//! operand  := var '.' key | literal
//! proj     := var | var '.' key | count '(' ('*' | var | var '.' key) ')'
//! ```

pub mod ast;
pub mod lexer;
mod parser;

use thiserror::Error;

pub use ast::{pretty_print, Query};
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

/// Upper bound on variable-length hop counts.
pub const MAX_HOPS: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Lex { offset: usize, message: String },
    #[error("syntax error at byte {offset}: expected {}", .expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String> },
    #[error("unbound variable '{name}' at byte {offset}")]
    UnboundVariable { name: String, offset: usize },
    #[error("semantic error at byte {offset}: {message}")]
    Semantic { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Lex { offset, .. }
            | ParseError::Syntax { offset, .. }
            | ParseError::UnboundVariable { offset, .. }
            | ParseError::Semantic { offset, .. } => *offset,
        }
    }
}
