use std::fmt::Write as _;

use crate::error::KbError;
use crate::model::{AttributeTree, KnowledgeBase, ObjectNode, RelationEdge, RelationKind};

/// Longest chain of objects the nested serializer expands inline. Deeper
/// relations are written as references so the output stays within the
/// reader's nesting limit.
pub const MAX_INLINE_DEPTH: usize = 256;

const INDENT: &str = "  ";

/// Escapes the five predefined XML entities.
pub fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str(INDENT);
    }
}

fn open_root(kb: &KnowledgeBase) -> Option<String> {
    if kb.objects().all(ObjectNode::is_stub) {
        None
    } else {
        Some("<xmlkr version=\"1.0\">\n".to_owned())
    }
}

const EMPTY_DOCUMENT: &str = "<xmlkr version=\"1.0\"/>\n";
const CLOSE_ROOT: &str = "</xmlkr>\n";

/// One `<object>` element per defined object, in declaration order, with
/// every relation written as a reference. Stubs are not written; the
/// references that point at them recreate them on parse.
pub fn serialize_flat(kb: &KnowledgeBase) -> String {
    let Some(mut out) = open_root(kb) else {
        return EMPTY_DOCUMENT.to_owned();
    };
    for node in kb.objects().filter(|o| !o.is_stub()) {
        write_flat_object(&mut out, node, 1);
    }
    out.push_str(CLOSE_ROOT);
    out
}

/// Writes `root` with its relation targets expanded inline.
///
/// Each object is expanded at most once. A relation back to an object on
/// the current expansion path is written as `<ref name="..."/>` inside the
/// relation element; a relation to an object already expanded elsewhere, to
/// a stub, or beyond [`MAX_INLINE_DEPTH`] is written as a plain reference.
/// Defined objects not expanded from `root` follow as flat definitions.
pub fn serialize_nested(kb: &KnowledgeBase, root: &str) -> Result<String, KbError> {
    let root_ix = kb.position(root).ok_or_else(|| KbError::UnknownObject(root.to_owned()))?;
    let Some(mut out) = open_root(kb) else {
        return Ok(EMPTY_DOCUMENT.to_owned());
    };
    let nodes: Vec<&ObjectNode> = kb.objects().collect();
    let mut nested = Nested {
        kb,
        nodes: &nodes,
        expanded: vec![false; nodes.len()],
        on_path: vec![false; nodes.len()],
        out: &mut out,
        path_len: 0,
    };
    if !nodes[root_ix].is_stub() {
        nested.object(root_ix, 1);
    }
    let expanded = nested.expanded;
    for (ix, node) in nodes.iter().enumerate() {
        if !node.is_stub() && !expanded[ix] {
            write_flat_object(&mut out, node, 1);
        }
    }
    out.push_str(CLOSE_ROOT);
    Ok(out)
}

fn write_open_object(out: &mut String, node: &ObjectNode, level: usize) -> bool {
    indent(out, level);
    let empty = node.attributes().is_empty() && node.edges().is_empty();
    let _ = write!(out, "<object name=\"{}\"", escape(node.name().as_str()));
    out.push_str(if empty { "/>\n" } else { ">\n" });
    for attr in node.attributes() {
        write_attr(out, attr, level + 1);
    }
    !empty
}

fn write_close_object(out: &mut String, level: usize) {
    indent(out, level);
    out.push_str("</object>\n");
}

fn write_flat_object(out: &mut String, node: &ObjectNode, level: usize) {
    if write_open_object(out, node, level) {
        for edge in node.edges() {
            write_reference(out, edge, level + 1);
        }
        write_close_object(out, level);
    }
}

fn write_attr(out: &mut String, attr: &AttributeTree, level: usize) {
    indent(out, level);
    let _ = write!(out, "<attr name=\"{}\">", escape(attr.name()));
    if let Some(v) = attr.value() {
        out.push_str(&escape(v));
    }
    if attr.children().is_empty() {
        out.push_str("</attr>\n");
        return;
    }
    out.push('\n');
    for child in attr.children() {
        write_attr(out, child, level + 1);
    }
    indent(out, level);
    out.push_str("</attr>\n");
}

/// `<isa ref=".."/>`, `<ako ref=".."/>` or `<rel kind=".." ref=".."/>`.
fn write_reference(out: &mut String, edge: &RelationEdge, level: usize) {
    indent(out, level);
    let target = escape(edge.target.as_str());
    let _ = match &edge.kind {
        RelationKind::Isa => writeln!(out, "<isa ref=\"{target}\"/>"),
        RelationKind::Ako => writeln!(out, "<ako ref=\"{target}\"/>"),
        RelationKind::Named(label) => writeln!(out, "<rel kind=\"{label}\" ref=\"{target}\"/>"),
    };
}

fn write_open_relation(out: &mut String, kind: &RelationKind, level: usize) {
    indent(out, level);
    let _ = match kind {
        RelationKind::Isa => writeln!(out, "<isa>"),
        RelationKind::Ako => writeln!(out, "<ako>"),
        RelationKind::Named(label) => writeln!(out, "<rel kind=\"{label}\">"),
    };
}

fn write_close_relation(out: &mut String, kind: &RelationKind, level: usize) {
    indent(out, level);
    out.push_str(match kind {
        RelationKind::Isa => "</isa>\n",
        RelationKind::Ako => "</ako>\n",
        RelationKind::Named(_) => "</rel>\n",
    });
}

struct Nested<'a> {
    kb: &'a KnowledgeBase,
    nodes: &'a [&'a ObjectNode],
    expanded: Vec<bool>,
    on_path: Vec<bool>,
    out: &'a mut String,
    path_len: usize,
}

impl Nested<'_> {
    fn object(&mut self, ix: usize, level: usize) {
        let node = self.nodes[ix];
        self.expanded[ix] = true;
        if !write_open_object(self.out, node, level) {
            return;
        }
        self.on_path[ix] = true;
        self.path_len += 1;
        for edge in node.edges() {
            let t = self.kb.position(edge.target.as_str()).expect("edge target exists");
            if self.on_path[t] {
                write_open_relation(self.out, &edge.kind, level + 1);
                indent(self.out, level + 2);
                let _ = writeln!(self.out, "<ref name=\"{}\"/>", escape(edge.target.as_str()));
                write_close_relation(self.out, &edge.kind, level + 1);
            } else if self.expanded[t] || self.nodes[t].is_stub() || self.path_len >= MAX_INLINE_DEPTH {
                write_reference(self.out, edge, level + 1);
            } else {
                write_open_relation(self.out, &edge.kind, level + 1);
                self.object(t, level + 2);
                write_close_relation(self.out, &edge.kind, level + 1);
            }
        }
        self.path_len -= 1;
        self.on_path[ix] = false;
        write_close_object(self.out, level);
    }
}
