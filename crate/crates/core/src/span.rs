use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifies the source file a span points into. Assigned by the module loader.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct SourceId(pub u32);

/// A (line, column) position, both 1-based, in a given source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Span {
    pub source: SourceId,
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(source: SourceId, line: u32, col: u32) -> Self {
        Span { source, line, col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
