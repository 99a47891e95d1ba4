//! Semantic networks stored as XMLKR documents.
//!
//! A [`KnowledgeBase`] holds named objects with nested attribute trees and
//! typed relation edges, either inheritance (`isa`/`ako`) or named. The [`codec`]
//! module reads and writes the XML form, either flat or with relation
//! targets expanded inline and cycles cut by `<ref>` markers. [`inference`]
//! resolves attributes through ISA/AKO inheritance, where the nearest
//! definition overrides inherited defaults, and [`query`] offers a small
//! textual query language on top.

pub mod analysis;
pub mod cli;
pub mod codec;
mod error;
pub mod inference;
pub mod model;
pub mod query;

pub use codec::{canonical_equal, parse_document, serialize_flat, serialize_nested, ParseError};
pub use error::KbError;
pub use model::{AttributeTree, KnowledgeBase, ObjectName, ObjectNode, RelationEdge, RelationKind};
