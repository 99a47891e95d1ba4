use std::fmt;

use thiserror::Error;

/// 1-based line and column (in characters) within a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pos {
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("unsupported or missing version on <xmlkr> (found {found:?}, expected \"1.0\")")]
    UnknownRootVersion { found: Option<String> },
    #[error("object \"{0}\" is defined more than once")]
    DuplicateObject(String),
    #[error("attribute \"{0}\" is defined twice at the same level")]
    DuplicateAttribute(String),
    /// Well-formed XML that does not follow the XMLKR grammar.
    #[error("{0}")]
    Schema(String),
}

/// A document error. Every error carries the position of the offending
/// construct.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {}, column {}: {kind}", pos.line, pos.column)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, pos: Pos) -> Self {
        ParseError { kind, pos }
    }
}
