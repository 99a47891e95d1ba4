use std::fmt;
use std::str::FromStr;

use crate::error::KbError;
use crate::model::name::ObjectName;

/// Relation labels that carry a conventional meaning in semantic networks.
/// Only `kind-of` is special: it is read as [`RelationKind::Ako`].
pub const PREDEFINED_LABELS: [&str; 6] = ["part-of", "has-part", "kind-of", "super-of", "same-as", "opposite-of"];

/// Label used for the edge implied by an `<object>` nested directly inside
/// another object.
pub const CONTAINS: &str = "contains";

/// Lowercase label of a named relation: `[a-z][a-z0-9-]*`.
///
/// A `Label` is never `isa`, `ako` or `kind-of`; those spellings parse to the
/// inheritance kinds instead, so each edge has exactly one representation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(String);

impl Label {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    /// Instance-of.
    Isa,
    /// A-kind-of, class to more general class.
    Ako,
    Named(Label),
}

impl RelationKind {
    /// Parses a relation label, case-insensitively.
    pub fn parse(label: &str) -> Result<Self, KbError> {
        let lower = label.to_ascii_lowercase();
        let mut chars = lower.chars();
        let well_formed =
            matches!(chars.next(), Some('a'..='z')) && chars.all(|c| matches!(c, 'a'..='z' | '0'..='9' | '-'));
        if !well_formed {
            return Err(KbError::InvalidLabel(label.to_owned()));
        }
        Ok(match lower.as_str() {
            "isa" => RelationKind::Isa,
            "ako" | "kind-of" => RelationKind::Ako,
            _ => RelationKind::Named(Label(lower)),
        })
    }

    pub fn named(label: &str) -> Result<Self, KbError> {
        Self::parse(label)
    }

    pub fn contains() -> Self {
        RelationKind::Named(Label(CONTAINS.to_owned()))
    }

    /// ISA and AKO edges carry attribute inheritance; named relations do not.
    pub fn is_inheritance(&self) -> bool {
        matches!(self, RelationKind::Isa | RelationKind::Ako)
    }

    pub fn label(&self) -> &str {
        match self {
            RelationKind::Isa => "isa",
            RelationKind::Ako => "ako",
            RelationKind::Named(l) => l.as_str(),
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for RelationKind {
    type Err = KbError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RelationKind::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationEdge {
    pub source: ObjectName,
    pub kind: RelationKind,
    pub target: ObjectName,
}

impl fmt::Display for RelationEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.source, self.kind, self.target)
    }
}
