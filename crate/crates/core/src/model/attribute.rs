use std::collections::HashSet;
use std::fmt;

use crate::error::KbError;
use crate::model::name::check_identifier;

/// Deepest attribute nesting accepted by the model. Keeps every valid tree
/// inside the document reader's nesting limit.
pub const MAX_ATTRIBUTE_DEPTH: usize = 256;

/// A named attribute carrying a text scalar, nested sub-attributes, or both.
///
/// Values are stored trimmed; a value that is empty after trimming counts as
/// absent. A tree always has a value or at least one child, and sibling
/// names are unique at every level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeTree {
    name: String,
    value: Option<String>,
    children: Vec<AttributeTree>,
}

impl AttributeTree {
    pub fn new(name: impl Into<String>, value: Option<String>, children: Vec<AttributeTree>) -> Result<Self, KbError> {
        let name = name.into();
        check_identifier(&name)
            .map_err(|reason| KbError::InvalidAttribute { name: name.clone(), reason: reason.into() })?;
        let value = value.map(|v| v.trim().to_owned()).filter(|v| !v.is_empty());
        if let Some(v) = &value {
            if v.chars().any(|c| c.is_control() && !matches!(c, '\t' | '\n' | '\r')) {
                return Err(KbError::InvalidAttribute { name, reason: "value contains a control character".into() });
            }
        }
        if value.is_none() && children.is_empty() {
            return Err(KbError::InvalidAttribute {
                name,
                reason: "attribute has neither a value nor sub-attributes".into(),
            });
        }
        check_unique_siblings(&children)?;
        let depth = 1 + children.iter().map(AttributeTree::depth).max().unwrap_or(0);
        if depth > MAX_ATTRIBUTE_DEPTH {
            return Err(KbError::InvalidAttribute {
                name,
                reason: format!("nesting deeper than {MAX_ATTRIBUTE_DEPTH} levels"),
            });
        }
        Ok(AttributeTree { name, value, children })
    }

    pub fn leaf(name: impl Into<String>, value: impl Into<String>) -> Result<Self, KbError> {
        Self::new(name, Some(value.into()), Vec::new())
    }

    pub fn branch(name: impl Into<String>, children: Vec<AttributeTree>) -> Result<Self, KbError> {
        Self::new(name, None, children)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> Option<&str> {
        self.value.as_deref()
    }

    pub fn children(&self) -> &[AttributeTree] {
        &self.children
    }

    pub fn child(&self, name: &str) -> Option<&AttributeTree> {
        self.children.iter().find(|c| c.name == name)
    }

    /// Number of nodes in this tree, counting itself.
    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(AttributeTree::node_count).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(AttributeTree::depth).max().unwrap_or(0)
    }
}

/// Follows `path` through a list of sibling trees.
pub fn lookup<'a, S: AsRef<str>>(roots: &'a [AttributeTree], path: &[S]) -> Option<&'a AttributeTree> {
    let (first, rest) = path.split_first()?;
    let mut node = roots.iter().find(|a| a.name == first.as_ref())?;
    for segment in rest {
        node = node.child(segment.as_ref())?;
    }
    Some(node)
}

pub(crate) fn check_unique_siblings(siblings: &[AttributeTree]) -> Result<(), KbError> {
    let mut seen = HashSet::with_capacity(siblings.len());
    for attr in siblings {
        if !seen.insert(attr.name.as_str()) {
            return Err(KbError::DuplicateAttribute(attr.name.clone()));
        }
    }
    Ok(())
}

/// Single-line rendering: the scalar, followed by `{name=value, ...}` when
/// sub-attributes exist.
impl fmt::Display for AttributeTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = &self.value {
            f.write_str(v)?;
            if !self.children.is_empty() {
                f.write_str(" ")?;
            }
        }
        if !self.children.is_empty() {
            f.write_str("{")?;
            for (i, child) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}={}", child.name, child)?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}
