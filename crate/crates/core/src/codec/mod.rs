//! Reading and writing XMLKR documents.
//!
//! ```text
//! document   := XMLDecl? <xmlkr version="1.0"> object* </xmlkr>
//! object     := <object name=NAME> attr* relation* </object>
//! attr       := <attr name=NAME> TEXT? attr* </attr>
//! relation   := <isa ref=NAME/> | <ako ref=NAME/> | <rel kind=LABEL ref=NAME/>
//!             | <isa> target </isa> | <ako> target </ako> | <rel kind=LABEL> target </rel>
//!             | object | <ref name=NAME/>          (bare nesting: a `contains` edge)
//! target     := object | <ref name=NAME/>
//! ```

mod error;
mod parse;
mod reader;
mod write;

pub use error::{ParseError, ParseErrorKind, Pos};
pub use parse::{parse_document, parse_document_bytes};
pub use reader::MAX_DEPTH;
pub use write::{escape, serialize_flat, serialize_nested, MAX_INLINE_DEPTH};

use crate::model::KnowledgeBase;

/// How a knowledge base is laid out in a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SerializationMode {
    Flat,
    Nested { root: String },
}

pub fn serialize(kb: &KnowledgeBase, mode: &SerializationMode) -> Result<String, crate::KbError> {
    match mode {
        SerializationMode::Flat => Ok(serialize_flat(kb)),
        SerializationMode::Nested { root } => serialize_nested(kb, root),
    }
}

/// See [`KnowledgeBase::canonical_eq`].
pub fn canonical_equal(a: &KnowledgeBase, b: &KnowledgeBase) -> bool {
    a.canonical_eq(b)
}
