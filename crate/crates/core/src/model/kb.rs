use indexmap::IndexMap;

use crate::error::KbError;
use crate::model::attribute::{self, AttributeTree};
use crate::model::name::ObjectName;
use crate::model::relation::{RelationEdge, RelationKind};
use crate::model::validate::{Finding, FindingCode, Level};

/// One object of the semantic network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectNode {
    name: ObjectName,
    attributes: Vec<AttributeTree>,
    edges: Vec<RelationEdge>,
    stub: bool,
}

impl ObjectNode {
    fn stub(name: ObjectName) -> Self {
        ObjectNode { name, attributes: Vec::new(), edges: Vec::new(), stub: true }
    }

    pub fn name(&self) -> &ObjectName {
        &self.name
    }

    pub fn attributes(&self) -> &[AttributeTree] {
        &self.attributes
    }

    /// Outgoing edges in declaration order.
    pub fn edges(&self) -> &[RelationEdge] {
        &self.edges
    }

    /// True when the object exists only because an edge points at it.
    pub fn is_stub(&self) -> bool {
        self.stub
    }

    pub fn attribute<S: AsRef<str>>(&self, path: &[S]) -> Option<&AttributeTree> {
        attribute::lookup(&self.attributes, path)
    }
}

/// A semantic network: named objects with attribute trees and typed edges.
///
/// Built single-threaded through [`add_object`](Self::add_object) and
/// [`add_relation`](Self::add_relation); afterwards it is only read, and
/// `&KnowledgeBase` may be shared freely across threads.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    objects: IndexMap<ObjectName, ObjectNode>,
    warnings: Vec<Finding>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.objects.contains_key(name)
    }

    pub fn object(&self, name: &str) -> Option<&ObjectNode> {
        self.objects.get(name)
    }

    /// Position of `name` in declaration order.
    pub fn position(&self, name: &str) -> Option<usize> {
        self.objects.get_index_of(name)
    }

    /// All objects, stubs included, in declaration order.
    pub fn objects(&self) -> impl ExactSizeIterator<Item = &ObjectNode> + '_ {
        self.objects.values()
    }

    pub fn names(&self) -> impl ExactSizeIterator<Item = &ObjectName> + '_ {
        self.objects.keys()
    }

    pub fn edges(&self) -> impl Iterator<Item = &RelationEdge> + '_ {
        self.objects.values().flat_map(|o| o.edges.iter())
    }

    /// Events recorded while building, such as stub creation.
    pub fn warnings(&self) -> &[Finding] {
        &self.warnings
    }

    pub(crate) fn require(&self, name: &str) -> Result<&ObjectNode, KbError> {
        self.objects.get(name).ok_or_else(|| KbError::UnknownObject(name.to_owned()))
    }

    /// Defines an object. A stub of the same name is promoted in place and
    /// keeps its position and inbound edges.
    pub fn add_object(&mut self, name: ObjectName, attributes: Vec<AttributeTree>) -> Result<ObjectName, KbError> {
        attribute::check_unique_siblings(&attributes)?;
        match self.objects.get_mut(name.as_str()) {
            Some(existing) if !existing.stub => Err(KbError::DuplicateObject(name.into_string())),
            Some(existing) => {
                existing.attributes = attributes;
                existing.stub = false;
                Ok(name)
            }
            None => {
                self.objects.insert(
                    name.clone(),
                    ObjectNode { name: name.clone(), attributes, edges: Vec::new(), stub: false },
                );
                Ok(name)
            }
        }
    }

    /// Appends an edge to `source`'s edge list. A missing target is created
    /// as a stub and a warning is recorded.
    pub fn add_relation(
        &mut self,
        source: &str,
        kind: RelationKind,
        target: ObjectName,
    ) -> Result<RelationEdge, KbError> {
        let source = self
            .objects
            .get_key_value(source)
            .map(|(k, _)| k.clone())
            .ok_or_else(|| KbError::UnknownSource(source.to_owned()))?;
        if self.reserve(target.clone()) {
            self.warnings.push(Finding::new(
                Level::Warn,
                FindingCode::StubObject,
                format!("object \"{target}\" is referenced by \"{source}\" but not defined"),
                vec![target.clone()],
            ));
        }
        let edge = RelationEdge { source: source.clone(), kind, target };
        self.objects[source.as_str()].edges.push(edge.clone());
        Ok(edge)
    }

    /// Makes sure `name` exists, inserting a stub if needed. Returns true
    /// when a stub was inserted.
    pub(crate) fn reserve(&mut self, name: ObjectName) -> bool {
        if self.objects.contains_key(name.as_str()) {
            return false;
        }
        self.objects.insert(name.clone(), ObjectNode::stub(name));
        true
    }

    /// Attribute at `path` in the object's own tree, without inheritance.
    pub fn get_local_attr<S: AsRef<str>>(&self, obj: &str, path: &[S]) -> Result<Option<&AttributeTree>, KbError> {
        Ok(self.require(obj)?.attribute(path))
    }

    /// Edge targets of `obj` in declaration order, optionally filtered by kind.
    pub fn neighbors(&self, obj: &str, kind: Option<&RelationKind>) -> Result<Vec<&ObjectName>, KbError> {
        Ok(self.require(obj)?.edges.iter().filter(|e| kind.is_none_or(|k| &e.kind == k)).map(|e| &e.target).collect())
    }

    /// Structural equality: same object names, and per object the same
    /// attribute trees, edge lists (order-sensitive) and stub flag.
    /// Declaration order of objects is not compared.
    pub fn canonical_eq(&self, other: &KnowledgeBase) -> bool {
        self.objects.len() == other.objects.len()
            && self.objects.iter().all(|(name, node)| other.objects.get(name).is_some_and(|o| o == node))
    }
}
