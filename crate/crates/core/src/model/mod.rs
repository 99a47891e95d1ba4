//! In-memory semantic network: objects, attribute trees and typed edges.

mod attribute;
mod kb;
mod name;
mod relation;
mod validate;

pub use attribute::{lookup, AttributeTree, MAX_ATTRIBUTE_DEPTH};
pub use kb::{KnowledgeBase, ObjectNode};
pub(crate) use name::check_identifier as name_check;
pub use name::ObjectName;
pub use relation::{Label, RelationEdge, RelationKind, CONTAINS, PREDEFINED_LABELS};
pub use validate::{validate, Finding, FindingCode, Level, ValidationReport};
