//! Surface syntax, from layout-aware tokens to a printed module.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod token;

use crate::span::Span;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("syntax error at {span}: {message}")]
pub struct SyntaxError {
    pub span: Span,
    pub message: String,
}

impl SyntaxError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        SyntaxError { span, message: message.into() }
    }
}

pub use ast::{SurfaceDefinition, SurfaceModule, Term, TermKind};
pub use lexer::{tokenize, tokenize_in};
pub use parser::{parse_module, parse_source, parse_term};
