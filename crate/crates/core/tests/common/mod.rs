//! Random knowledge bases and brute-force oracles shared by the integration
//! tests. Nothing here calls into `xmlkr::inference`.

#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xmlkr::model::{AttributeTree, KnowledgeBase, ObjectName, RelationKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub max_objects: usize,
    pub max_edges: usize,
    /// Adds an ISA/AKO ring and a self-loop.
    pub force_cycle: bool,
    /// Share of edge targets that are never defined.
    pub stub_rate: f64,
    /// Names and values with spaces, markup characters and non-ASCII text.
    pub fancy_text: bool,
}

impl GenParams {
    pub fn small() -> Self {
        GenParams { max_objects: 50, max_edges: 4, force_cycle: false, stub_rate: 0.1, fancy_text: false }
    }
}

const ATTR_NAMES: [&str; 6] = ["legs", "skin", "color", "grain", "food", "birth"];
const VALUES: [&str; 6] = ["1", "2", "4", "fur", "White", "live"];
const FANCY_VALUES: [&str; 5] = ["a & b", "<tag attr=\"x\">", "it's", "two\nlines", "سفید"];
const LABELS: [&str; 6] = ["part-of", "has-part", "same-as", "linked-to", "contains", "opposite-of"];

fn object_name(i: usize, fancy: bool) -> String {
    if fancy {
        match i % 4 {
            0 => format!("obj {i}"),
            1 => format!("o<{i}>&\"'"),
            2 => format!("ماشین{i}"),
            _ => format!("o{i}"),
        }
    } else {
        format!("o{i}")
    }
}

fn random_attr(rng: &mut impl Rng, name: &str, depth: usize, p: &GenParams) -> AttributeTree {
    let n_children = if depth >= 3 { 0 } else { rng.random_range(0..=2usize).saturating_sub(rng.random_range(0..=1)) };
    let mut pool = ATTR_NAMES.to_vec();
    let mut children = Vec::new();
    for _ in 0..n_children {
        let ix = rng.random_range(0..pool.len());
        let child = pool.swap_remove(ix);
        children.push(random_attr(rng, child, depth + 1, p));
    }
    let value = if children.is_empty() || rng.random_bool(0.4) {
        let v = if p.fancy_text && rng.random_bool(0.3) {
            *FANCY_VALUES.choose(rng).unwrap()
        } else {
            *VALUES.choose(rng).unwrap()
        };
        Some(v.to_owned())
    } else {
        None
    };
    AttributeTree::new(name, value, children).unwrap()
}

fn random_kind(rng: &mut impl Rng) -> RelationKind {
    match rng.random_range(0..10) {
        0..=3 => RelationKind::Isa,
        4..=6 => RelationKind::Ako,
        _ => RelationKind::named(LABELS.choose(rng).unwrap()).unwrap(),
    }
}

/// Objects are defined in index order and each object's edges are added
/// right after it, so forward references start as stubs and get promoted.
pub fn random_kb(rng: &mut impl Rng, p: &GenParams) -> KnowledgeBase {
    let n = rng.random_range(1..=p.max_objects);
    let names: Vec<String> = (0..n).map(|i| object_name(i, p.fancy_text)).collect();
    let stub_names: Vec<String> = (0..3).map(|i| format!("stub{i}")).collect();
    let mut kb = KnowledgeBase::new();
    for name in &names {
        let mut pool = ATTR_NAMES.to_vec();
        let attrs = (0..rng.random_range(0..=2))
            .map(|_| {
                let ix = rng.random_range(0..pool.len());
                let a = pool.swap_remove(ix);
                random_attr(rng, a, 1, p)
            })
            .collect();
        kb.add_object(ObjectName::new(name.as_str()).unwrap(), attrs).unwrap();
        for _ in 0..rng.random_range(0..=p.max_edges) {
            let target =
                if rng.random_bool(p.stub_rate) { stub_names.choose(rng).unwrap() } else { names.choose(rng).unwrap() };
            kb.add_relation(name, random_kind(rng), ObjectName::new(target.as_str()).unwrap()).unwrap();
        }
    }
    if p.force_cycle {
        let len = rng.random_range(1..=n.min(5));
        let ring: Vec<&String> = names.choose_multiple(rng, len).collect();
        for (i, src) in ring.iter().enumerate() {
            let dst = ring[(i + 1) % ring.len()];
            let kind = if rng.random_bool(0.5) { RelationKind::Isa } else { RelationKind::Ako };
            kb.add_relation(src, kind, ObjectName::new(dst.as_str()).unwrap()).unwrap();
        }
        let looped = names.choose(rng).unwrap();
        kb.add_relation(looped, RelationKind::Ako, ObjectName::new(looped.as_str()).unwrap()).unwrap();
    }
    kb
}

/// True when the ISA/AKO graph has a cycle or self-loop (checked by
/// boolean closure).
pub fn has_inheritance_cycle(kb: &KnowledgeBase) -> bool {
    let o = Oracle::new(kb);
    (0..o.n).any(|i| o.reach[i][i])
}

pub const INF: u32 = u32::MAX;

/// Independent closure computations over the ISA/AKO edges of a KB.
pub struct Oracle {
    pub n: usize,
    pub names: Vec<ObjectName>,
    /// Per object: (target index, position in the object's edge list, kind).
    pub edges: Vec<Vec<(usize, usize, RelationKind)>>,
    /// Shortest ISA/AKO path length of at least one edge, by min-plus
    /// repeated squaring.
    pub dist: Vec<Vec<u32>>,
    /// Transitive closure by boolean relation squaring.
    pub reach: Vec<Vec<bool>>,
    /// Per object x: closure of the graph with x removed.
    without: Vec<Vec<u128>>,
    attrs: Vec<Vec<AttributeTree>>,
    stub: Vec<bool>,
}

fn min_plus_closure(mut d: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
    let n = d.len();
    loop {
        let mut next = d.clone();
        for i in 0..n {
            for (k, &ik) in d[i].iter().enumerate() {
                if ik == INF {
                    continue;
                }
                for j in 0..n {
                    if d[k][j] != INF && ik + d[k][j] < next[i][j] {
                        next[i][j] = ik + d[k][j];
                    }
                }
            }
        }
        if next == d {
            return d;
        }
        d = next;
    }
}

/// R+ by squaring: R := R ∪ R·R until nothing changes. Rows are bitsets.
pub fn boolean_closure(mut r: Vec<u128>) -> Vec<u128> {
    let n = r.len();
    assert!(n <= 128, "oracle handles at most 128 objects");
    loop {
        let mut next = r.clone();
        for i in 0..n {
            for k in 0..n {
                if r[i] >> k & 1 == 1 {
                    next[i] |= r[k];
                }
            }
        }
        if next == r {
            return r;
        }
        r = next;
    }
}

fn bit(row: u128, j: usize) -> bool {
    row >> j & 1 == 1
}

fn lookup<'a>(roots: &'a [AttributeTree], path: &[&str]) -> Option<&'a AttributeTree> {
    let (first, rest) = path.split_first()?;
    let mut node = roots.iter().find(|a| a.name() == *first)?;
    for seg in rest {
        node = node.children().iter().find(|c| c.name() == *seg)?;
    }
    Some(node)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleValue {
    pub value: AttributeTree,
    pub provider: ObjectName,
    pub distance: usize,
    pub conflicts: Vec<ObjectName>,
}

impl Oracle {
    pub fn new(kb: &KnowledgeBase) -> Self {
        let names: Vec<ObjectName> = kb.names().cloned().collect();
        let n = names.len();
        let index = |name: &ObjectName| names.iter().position(|x| x == name).unwrap();
        let edges: Vec<Vec<(usize, usize, RelationKind)>> = kb
            .objects()
            .map(|o| o.edges().iter().enumerate().map(|(i, e)| (index(&e.target), i, e.kind.clone())).collect())
            .collect();
        let mut d = vec![vec![INF; n]; n];
        let mut r = vec![0u128; n];
        for (s, list) in edges.iter().enumerate() {
            for (t, _, kind) in list {
                if matches!(kind, RelationKind::Isa | RelationKind::Ako) {
                    d[s][*t] = 1;
                    r[s] |= 1 << t;
                }
            }
        }
        let dist = min_plus_closure(d);
        let without = (0..n)
            .map(|x| {
                let keep = !(1u128 << x);
                boolean_closure(r.iter().enumerate().map(|(s, row)| if s == x { 0 } else { row & keep }).collect())
            })
            .collect();
        let reach: Vec<Vec<bool>> =
            boolean_closure(r).into_iter().map(|row| (0..n).map(|j| bit(row, j)).collect()).collect();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(dist[i][j] != INF, reach[i][j], "oracles disagree on reachability");
            }
        }
        Oracle {
            n,
            names,
            edges,
            dist,
            reach,
            without,
            attrs: kb.objects().map(|o| o.attributes().to_vec()).collect(),
            stub: kb.objects().map(|o| o.is_stub()).collect(),
        }
    }

    pub fn index(&self, name: &str) -> usize {
        self.names.iter().position(|x| x.as_str() == name).unwrap()
    }

    fn inheritance_edges(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges[v]
            .iter()
            .filter(|(_, _, k)| matches!(k, RelationKind::Isa | RelationKind::Ako))
            .map(|(t, i, _)| (*t, *i))
    }

    /// Lexicographically smallest sequence of edge positions over the
    /// shortest paths from `s` to `t`, found by depth-first descent in edge
    /// order restricted to nodes that lie on some shortest path.
    pub fn lex_key(&self, s: usize, t: usize) -> Vec<usize> {
        let total = self.dist[s][t];
        assert_ne!(total, INF);
        let mut key = Vec::new();
        let mut at = s;
        for depth in 1..=total {
            let (next, idx) = self
                .inheritance_edges(at)
                .find(|&(u, _)| {
                    let remaining = total - depth;
                    let on_prefix = self.dist[s][u] == depth || (u == t && remaining == 0);
                    let to_target = if remaining == 0 { u == t } else { self.dist[u][t] == remaining };
                    on_prefix && to_target
                })
                .expect("a shortest path continues");
            key.push(idx);
            at = next;
        }
        key
    }

    /// All ISA/AKO-reachable objects with minimal distance, ordered by
    /// distance and then by lexicographic edge-position key.
    pub fn ancestors(&self, obj: &str) -> Vec<(ObjectName, usize)> {
        let s = self.index(obj);
        let mut out: Vec<(usize, u32, Vec<usize>)> =
            (0..self.n).filter(|&t| self.dist[s][t] != INF).map(|t| (t, self.dist[s][t], self.lex_key(s, t))).collect();
        out.sort_by(|a, b| (a.1, &a.2).cmp(&(b.1, &b.2)));
        out.into_iter().map(|(t, d, _)| (self.names[t].clone(), d as usize)).collect()
    }

    pub fn is_a(&self, obj: &str, class: &str) -> bool {
        let (o, c) = (self.index(obj), self.index(class));
        o == c || self.reach[o][c]
    }

    pub fn resolve(&self, obj: &str, path: &[&str]) -> Option<OracleValue> {
        let s = self.index(obj);
        if let Some(v) = lookup(&self.attrs[s], path) {
            return Some(OracleValue {
                value: v.clone(),
                provider: self.names[s].clone(),
                distance: 0,
                conflicts: vec![],
            });
        }
        let mut definers: Vec<(u32, Vec<usize>, usize)> = (0..self.n)
            .filter(|&t| t != s && self.dist[s][t] != INF && lookup(&self.attrs[t], path).is_some())
            .map(|t| (self.dist[s][t], self.lex_key(s, t), t))
            .collect();
        definers.sort();
        let &(best, _, provider) = definers.first()?;
        let conflicts = definers[1..].iter().filter(|d| d.0 == best).map(|d| self.names[d.2].clone()).collect();
        Some(OracleValue {
            value: lookup(&self.attrs[provider], path).unwrap().clone(),
            provider: self.names[provider].clone(),
            distance: best as usize,
            conflicts,
        })
    }

    /// Objects reaching `class` by a simple ISA-first path, via closures of
    /// the graph with the candidate instance removed.
    pub fn instances(&self, class: &str, transitive: bool) -> Vec<ObjectName> {
        let c = self.index(class);
        let mut out = Vec::new();
        for x in 0..self.n {
            let isa: Vec<usize> = self.edges[x].iter().filter(|e| e.2 == RelationKind::Isa).map(|e| e.0).collect();
            let hit = if !transitive {
                isa.contains(&c)
            } else if c == x {
                isa.iter().any(|&y| y == x || self.reach[y][x])
            } else {
                isa.iter().any(|&y| y != x && (y == c || bit(self.without[x][y], c)))
            };
            if hit {
                out.push(self.names[x].clone());
            }
        }
        out
    }

    /// Exhaustive enumeration of every simple path starting with an ISA
    /// edge (closing back at the start allowed). Only for tiny graphs.
    pub fn instances_by_enumeration(&self, class: &str) -> Vec<ObjectName> {
        let c = self.index(class);
        let mut out = Vec::new();
        for x in 0..self.n {
            let mut found = false;
            for &(y, _, ref k) in &self.edges[x] {
                if *k != RelationKind::Isa {
                    continue;
                }
                let mut on_path = vec![false; self.n];
                on_path[x] = true;
                found |= self.walk(y, x, c, &mut on_path);
            }
            if found {
                out.push(self.names[x].clone());
            }
        }
        out
    }

    fn walk(&self, v: usize, start: usize, goal: usize, on_path: &mut Vec<bool>) -> bool {
        if v == goal {
            return true;
        }
        if v == start || on_path[v] {
            return false;
        }
        on_path[v] = true;
        let mut hit = false;
        for (t, _) in self.inheritance_edges(v).collect::<Vec<_>>() {
            if !on_path[t] || t == start {
                hit |= self.walk(t, start, goal, on_path);
            }
        }
        on_path[v] = false;
        hit
    }

    /// Defined objects whose oracle-resolved scalar equals `expected`.
    pub fn find(&self, path: &[&str], expected: &str) -> Vec<ObjectName> {
        (0..self.n)
            .filter(|&i| !self.stub[i])
            .filter(|&i| {
                self.resolve(self.names[i].as_str(), path)
                    .is_some_and(|r| r.value.value().map(str::trim) == Some(expected.trim()))
            })
            .map(|i| self.names[i].clone())
            .collect()
    }
}

pub fn data_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

pub fn xmlkr<I, S>(args: I) -> std::process::Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    std::process::Command::new(env!("CARGO_BIN_EXE_xmlkr")).args(args).output().expect("spawn xmlkr")
}

/// Column names of `corpus.tsv` after the file name.
pub const CORPUS_COLUMNS: [&str; 7] = [
    "validate",
    "validate --strict",
    "stats",
    "export flat",
    "query find",
    "query unknown object",
    "export nested ghost",
];

pub fn corpus_args(file: &std::path::Path, column: usize) -> Vec<std::ffi::OsString> {
    let f = file.as_os_str().to_owned();
    let words: &[&str] = match column {
        0 => &["validate"],
        1 => &["validate", "--strict"],
        2 => &["stats"],
        3 => &["export", "--mode", "flat"],
        4 => &["query", "--q", "find legs=4"],
        5 => &["query", "--q", "ancestors nobody-by-this-name"],
        6 => &["export", "--mode", "nested", "--root", "nobody-by-this-name"],
        _ => unreachable!(),
    };
    let mut args: Vec<std::ffi::OsString> = vec![words[0].into(), f];
    args.extend(words[1..].iter().map(Into::into));
    args
}

/// Rows of the expected exit-code table: file path and one code per column.
pub fn corpus_table() -> Vec<(std::path::PathBuf, [i32; 7])> {
    let text = std::fs::read_to_string(data_dir().join("corpus.tsv")).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let mut cols = l.split('\t');
            let file = data_dir().join("corpus").join(cols.next().unwrap());
            let codes: Vec<i32> = cols.map(|c| c.parse().unwrap()).collect();
            (file, codes.try_into().expect("seven exit codes per row"))
        })
        .collect()
}

pub const PATHS: [&[&str]; 5] = [&["legs"], &["skin"], &["grain"], &["grain", "color"], &["food", "legs"]];

/// Every place where the library's inference disagrees with the oracles.
/// Classes for `instances_of` are limited to `classes` (all when `None`).
pub fn oracle_disagreements(kb: &KnowledgeBase, classes: Option<usize>) -> Vec<String> {
    use xmlkr::inference::{ancestors, instances_of, is_a, resolve_attr};
    use xmlkr::query::{execute, QueryExpr};

    let o = Oracle::new(kb);
    let mut bad = Vec::new();
    let mut check = |ok: bool, what: String| {
        if !ok {
            bad.push(what);
        }
    };
    for (i, name) in kb.names().enumerate() {
        let obj = name.as_str();
        let got: Vec<_> = ancestors(kb, obj).unwrap().into_iter().map(|(n, d)| (n.clone(), d)).collect();
        check(got == o.ancestors(obj), format!("ancestors({obj}): {got:?}"));

        if classes.is_none_or(|c| i < c) {
            for transitive in [false, true] {
                let got: Vec<_> = instances_of(kb, obj, transitive).unwrap().into_iter().cloned().collect();
                check(got == o.instances(obj, transitive), format!("instances_of({obj}, {transitive}): {got:?}"));
            }
        }

        for path in PATHS {
            let got = resolve_attr(kb, obj, path).unwrap();
            let want = o.resolve(obj, path);
            let same = match (&got, &want) {
                (None, None) => true,
                (Some(g), Some(w)) => {
                    g.distance == w.distance
                        && g.provider == &w.provider
                        && g.value == &w.value
                        && g.conflicts.iter().copied().eq(w.conflicts.iter())
                        && g.path.nodes.len() == g.distance + 1
                        && g.path.nodes.first() == Some(&name)
                        && g.path.nodes.last() == Some(&g.provider)
                }
                _ => false,
            };
            check(same, format!("resolve_attr({obj}, {path:?}): {got:?} vs oracle {want:?}"));
        }
    }

    let names: Vec<_> = kb.names().collect();
    for a in &names {
        for b in &names {
            let got = is_a(kb, a.as_str(), b.as_str()).unwrap();
            check(got == o.is_a(a.as_str(), b.as_str()), format!("is_a({a}, {b}) = {got}"));
        }
    }

    for path in PATHS {
        for expected in ["4", "fur", "2"] {
            let expr =
                QueryExpr::Find { path: path.iter().map(|s| s.to_string()).collect(), expected: expected.into() };
            let got: Vec<_> = execute(kb, &expr).unwrap().rows.into_iter().map(|r| r.object).collect();
            check(got == o.find(path, expected), format!("find {path:?}={expected}: {got:?}"));
        }
    }
    bad
}
