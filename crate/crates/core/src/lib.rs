//! Interpreter for a small functional language that records a dynamic
//! dependence graph while it evaluates, plus the slicing and view-building
//! machinery needed to explain outputs in terms of inputs.

pub mod desugar;
pub mod document;
pub mod eval;
pub mod graph;
pub mod loader;
pub mod span;
pub mod syntax;
pub mod view;

pub use span::{SourceId, Span};
