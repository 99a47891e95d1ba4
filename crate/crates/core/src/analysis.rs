//! Whole-graph measurements used by validation and `xmlkr stats`.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::model::{KnowledgeBase, ObjectName, RelationEdge, RelationKind};

/// Default number of DFS steps [`longest_simple_path`] may spend before it
/// settles for a lower bound.
pub const LONGEST_PATH_BUDGET: u64 = 2_000_000;

/// Graph over declaration indices, keeping only edges accepted by `keep`.
fn index_graph(kb: &KnowledgeBase, keep: impl Fn(&RelationEdge) -> bool) -> DiGraph<(), ()> {
    let mut g = DiGraph::with_capacity(kb.object_count(), 0);
    for _ in 0..kb.object_count() {
        g.add_node(());
    }
    for edge in kb.edges().filter(|e| keep(e)) {
        let (Some(s), Some(t)) = (kb.position(edge.source.as_str()), kb.position(edge.target.as_str())) else {
            continue;
        };
        g.add_edge(NodeIndex::new(s), NodeIndex::new(t), ());
    }
    g
}

/// Strongly connected groups of two or more objects, members and groups in
/// declaration order. Self-loops alone do not form a group here.
pub fn cycle_groups(kb: &KnowledgeBase, keep: impl Fn(&RelationEdge) -> bool) -> Vec<Vec<ObjectName>> {
    let g = index_graph(kb, keep);
    let mut groups: Vec<Vec<usize>> = tarjan_scc(&g)
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            let mut ix: Vec<usize> = c.into_iter().map(NodeIndex::index).collect();
            ix.sort_unstable();
            ix
        })
        .collect();
    groups.sort_unstable_by_key(|c| c[0]);
    let names: Vec<&ObjectName> = kb.names().collect();
    groups.into_iter().map(|c| c.into_iter().map(|i| names[i].clone()).collect()).collect()
}

/// Number of cyclic strongly connected components: groups of two or more,
/// plus single objects carrying a self-loop.
pub fn cycle_count(kb: &KnowledgeBase, keep: impl Fn(&RelationEdge) -> bool) -> usize {
    let g = index_graph(kb, keep);
    tarjan_scc(&g).into_iter().filter(|c| c.len() > 1 || g.contains_edge(c[0], c[0])).count()
}

/// Edge count of the longest simple path, or a lower bound when the search
/// budget ran out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathLength {
    Exact(usize),
    AtLeast(usize),
}

impl PathLength {
    pub fn value(self) -> usize {
        match self {
            PathLength::Exact(n) | PathLength::AtLeast(n) => n,
        }
    }
}

impl fmt::Display for PathLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathLength::Exact(n) => write!(f, "{n}"),
            PathLength::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

/// Longest simple path over edges accepted by `keep`.
///
/// Acyclic graphs are solved exactly by dynamic programming. Otherwise the
/// problem is NP-hard and an exhaustive DFS runs until `budget` steps are
/// spent.
pub fn longest_simple_path(kb: &KnowledgeBase, keep: impl Fn(&RelationEdge) -> bool, budget: u64) -> PathLength {
    let g = index_graph(kb, keep);
    let n = g.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in g.raw_edges() {
        let (s, t) = (e.source().index(), e.target().index());
        if s != t && !adj[s].contains(&t) {
            adj[s].push(t);
        }
    }

    if let Ok(order) = petgraph::algo::toposort(&g, None) {
        let mut best = vec![0usize; n];
        for v in order.into_iter().rev() {
            let v = v.index();
            best[v] = adj[v].iter().map(|&t| best[t] + 1).max().unwrap_or(0);
        }
        return PathLength::Exact(best.into_iter().max().unwrap_or(0));
    }

    struct Search<'a> {
        adj: &'a [Vec<usize>],
        on_path: Vec<bool>,
        steps: u64,
        budget: u64,
        best: usize,
    }
    impl Search<'_> {
        // Returns false once the budget is exhausted.
        fn run(&mut self, v: usize, len: usize) -> bool {
            self.steps += 1;
            if self.steps > self.budget {
                return false;
            }
            self.best = self.best.max(len);
            if self.best + 1 >= self.adj.len() {
                // a Hamiltonian path cannot be beaten
                return true;
            }
            self.on_path[v] = true;
            for &t in &self.adj[v] {
                if !self.on_path[t] && !self.run(t, len + 1) {
                    self.on_path[v] = false;
                    return false;
                }
            }
            self.on_path[v] = false;
            true
        }
    }

    let mut search = Search { adj: &adj, on_path: vec![false; n], steps: 0, budget, best: 0 };
    for v in 0..n {
        if search.best + 1 >= n {
            break;
        }
        if !search.run(v, 0) {
            return PathLength::AtLeast(search.best);
        }
    }
    PathLength::Exact(search.best)
}

/// Counts reported by `xmlkr stats`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stats {
    pub objects: usize,
    pub stubs: usize,
    /// Attribute tree nodes over all objects.
    pub attrs: usize,
    pub isa: usize,
    pub ako: usize,
    /// Named-relation edge counts by label.
    pub named: BTreeMap<String, usize>,
    pub cycles: usize,
    pub max_depth: PathLength,
}

impl Stats {
    pub fn collect(kb: &KnowledgeBase) -> Stats {
        let mut named = BTreeMap::new();
        let (mut isa, mut ako) = (0, 0);
        for edge in kb.edges() {
            match &edge.kind {
                RelationKind::Isa => isa += 1,
                RelationKind::Ako => ako += 1,
                RelationKind::Named(l) => *named.entry(l.as_str().to_owned()).or_insert(0) += 1,
            }
        }
        Stats {
            objects: kb.object_count(),
            stubs: kb.objects().filter(|o| o.is_stub()).count(),
            attrs: kb.objects().flat_map(|o| o.attributes()).map(|a| a.node_count()).sum(),
            isa,
            ako,
            named,
            cycles: cycle_count(kb, |_| true),
            max_depth: longest_simple_path(kb, |_| true, LONGEST_PATH_BUDGET),
        }
    }
}

/// `objects=.. stubs=.. attrs=.. isa=.. ako=.. named=.. cycles=.. max_depth=..`
/// followed by one `rel:<label>=..` field per named label.
impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "objects={} stubs={} attrs={} isa={} ako={} named={} cycles={} max_depth={}",
            self.objects,
            self.stubs,
            self.attrs,
            self.isa,
            self.ako,
            self.named.values().sum::<usize>(),
            self.cycles,
            self.max_depth
        )?;
        for (label, count) in &self.named {
            write!(f, " rel:{label}={count}")?;
        }
        Ok(())
    }
}
