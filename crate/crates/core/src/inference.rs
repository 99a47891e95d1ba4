//! Attribute inheritance over ISA and AKO edges.
//!
//! Both ISA and AKO edges carry inheritance, followed in their declared
//! direction only. A local definition always wins; otherwise the nearest
//! definer in breadth-first order provides the whole subtree at the
//! requested path. Ties at equal distance go to the definer discovered
//! first, i.e. through the earliest-declared edges. Every traversal keeps a
//! visited set, so cycles and self-loops terminate.

use std::collections::VecDeque;

use crate::error::KbError;
use crate::model::{AttributeTree, KnowledgeBase, ObjectName, ObjectNode};

/// An attribute found on the queried object or one of its ancestors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedValue<'kb> {
    pub value: &'kb AttributeTree,
    pub provider: &'kb ObjectName,
    /// Inheritance hops from the queried object; 0 for a local value.
    pub distance: usize,
    /// Queried object first, provider last.
    pub path: InheritancePath<'kb>,
    /// Other objects defining the same path at the same distance, which
    /// lost the tie-break.
    pub conflicts: Vec<&'kb ObjectName>,
}

/// Simple path along ISA/AKO edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InheritancePath<'kb> {
    pub nodes: Vec<&'kb ObjectName>,
}

struct Graph<'kb> {
    kb: &'kb KnowledgeBase,
    nodes: Vec<&'kb ObjectNode>,
}

impl<'kb> Graph<'kb> {
    fn new(kb: &'kb KnowledgeBase) -> Self {
        Graph { kb, nodes: kb.objects().collect() }
    }

    fn index(&self, name: &str) -> Result<usize, KbError> {
        self.kb.position(name).ok_or_else(|| KbError::UnknownObject(name.to_owned()))
    }

    /// Targets of `ix`'s ISA and AKO edges, in declaration order.
    fn parents(&self, ix: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes[ix]
            .edges()
            .iter()
            .filter(|e| e.kind.is_inheritance())
            .map(|e| self.kb.position(e.target.as_str()).expect("edge target exists"))
    }

    fn name(&self, ix: usize) -> &'kb ObjectName {
        self.nodes[ix].name()
    }
}

/// Resolves `path` on `obj`, falling back to inherited values.
pub fn resolve_attr<'kb, S: AsRef<str>>(
    kb: &'kb KnowledgeBase,
    obj: &str,
    path: &[S],
) -> Result<Option<ResolvedValue<'kb>>, KbError> {
    let g = Graph::new(kb);
    let start = g.index(obj)?;
    if let Some(value) = g.nodes[start].attribute(path) {
        let provider = g.name(start);
        return Ok(Some(ResolvedValue {
            value,
            provider,
            distance: 0,
            path: InheritancePath { nodes: vec![provider] },
            conflicts: Vec::new(),
        }));
    }

    let n = g.nodes.len();
    let mut parent = vec![usize::MAX; n];
    let mut dist = vec![usize::MAX; n];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    let mut found: Option<(usize, &'kb AttributeTree)> = None;
    let mut conflicts = Vec::new();

    while let Some(v) = queue.pop_front() {
        if found.is_some_and(|(f, _)| dist[v] >= dist[f]) {
            break;
        }
        for t in g.parents(v) {
            if dist[t] != usize::MAX {
                continue;
            }
            dist[t] = dist[v] + 1;
            parent[t] = v;
            if let Some(value) = g.nodes[t].attribute(path) {
                match found {
                    None => found = Some((t, value)),
                    Some((f, _)) if dist[f] == dist[t] => conflicts.push(g.name(t)),
                    Some(_) => {}
                }
            }
            queue.push_back(t);
        }
    }

    Ok(found.map(|(f, value)| {
        let mut nodes = vec![g.name(f)];
        let mut at = f;
        while at != start {
            at = parent[at];
            nodes.push(g.name(at));
        }
        nodes.reverse();
        ResolvedValue { value, provider: g.name(f), distance: dist[f], path: InheritancePath { nodes }, conflicts }
    }))
}

/// Everything reachable from `obj` over ISA/AKO edges, each once with its
/// minimal distance, in breadth-first order. `obj` itself appears only when
/// a cycle leads back to it.
pub fn ancestors<'kb>(kb: &'kb KnowledgeBase, obj: &str) -> Result<Vec<(&'kb ObjectName, usize)>, KbError> {
    let g = Graph::new(kb);
    let start = g.index(obj)?;
    let mut seen = vec![false; g.nodes.len()];
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((v, d)) = queue.pop_front() {
        for t in g.parents(v) {
            if seen[t] {
                continue;
            }
            seen[t] = true;
            out.push((g.name(t), d + 1));
            if t != start {
                queue.push_back((t, d + 1));
            }
        }
    }
    Ok(out)
}

/// Instances of `class`, in declaration order.
///
/// Without `transitive`, the objects with a direct ISA edge to `class`.
/// With it, the objects that reach `class` along a simple path whose first
/// hop is ISA, so instances of a subclass count as instances of its AKO
/// ancestors.
pub fn instances_of<'kb>(
    kb: &'kb KnowledgeBase,
    class: &str,
    transitive: bool,
) -> Result<Vec<&'kb ObjectName>, KbError> {
    let g = Graph::new(kb);
    let target = g.index(class)?;
    let isa_targets = |ix: usize| {
        g.nodes[ix]
            .edges()
            .iter()
            .filter(|e| e.kind == crate::model::RelationKind::Isa)
            .map(|e| kb.position(e.target.as_str()).expect("edge target exists"))
    };

    if !transitive {
        return Ok((0..g.nodes.len()).filter(|&x| isa_targets(x).any(|t| t == target)).map(|x| g.name(x)).collect());
    }

    let mut seen = vec![usize::MAX; g.nodes.len()];
    let mut out = Vec::new();
    for x in 0..g.nodes.len() {
        // Search from x's ISA targets without passing through x again; the
        // path stays simple, and may end at x only when x is the class.
        let mut queue: VecDeque<usize> = VecDeque::new();
        for t in isa_targets(x) {
            if seen[t] != x {
                seen[t] = x;
                queue.push_back(t);
            }
        }
        let mut hit = false;
        while let Some(v) = queue.pop_front() {
            if v == target {
                hit = true;
                break;
            }
            if v == x {
                continue;
            }
            for t in g.parents(v) {
                if seen[t] != x {
                    seen[t] = x;
                    queue.push_back(t);
                }
            }
        }
        if hit {
            out.push(g.name(x));
        }
    }
    Ok(out)
}

/// True when `class` is `obj` or one of its ancestors.
pub fn is_a(kb: &KnowledgeBase, obj: &str, class: &str) -> Result<bool, KbError> {
    kb.require(class)?;
    if obj == class {
        kb.require(obj)?;
        return Ok(true);
    }
    Ok(ancestors(kb, obj)?.iter().any(|(name, _)| name.as_str() == class))
}
