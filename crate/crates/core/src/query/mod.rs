//! A five-form query language over a knowledge base.
//!
//! | query                          | rows                                          |
//! |--------------------------------|-----------------------------------------------|
//! | `attr Persia.color`            | the resolved (possibly inherited) value       |
//! | `ancestors Persia`             | ISA/AKO closure, breadth-first with distances |
//! | `instances Car [transitive]`   | instances in declaration order                |
//! | `find legs=4`                  | every object whose resolved value matches     |
//! | `related Persia [kind=isa]`    | edge targets, labelled with the edge kind     |

mod parser;

use std::fmt;

pub use parser::{parse_query, parse_query_bytes, SyntaxError};

use crate::error::KbError;
use crate::inference;
use crate::model::{KnowledgeBase, ObjectName, RelationKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryExpr {
    Attr { object: ObjectName, path: Vec<String> },
    Ancestors { object: ObjectName },
    Instances { class: ObjectName, transitive: bool },
    Find { path: Vec<String>, expected: String },
    Related { object: ObjectName, kind: Option<RelationKind> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub object: ObjectName,
    /// Single-line rendering of the value: the scalar, sub-attributes as
    /// `{name=value, ...}`, or the edge label for `related`.
    pub value: Option<String>,
    pub provider: Option<ObjectName>,
    pub distance: Option<usize>,
}

impl Row {
    fn object(object: &ObjectName) -> Self {
        Row { object: object.clone(), value: None, provider: None, distance: None }
    }
}

fn cell(f: &mut fmt::Formatter<'_>, text: Option<&str>) -> fmt::Result {
    let Some(text) = text else {
        return f.write_str("-");
    };
    for c in text.chars() {
        match c {
            '\t' => f.write_str("\\t")?,
            '\n' => f.write_str("\\n")?,
            '\r' => f.write_str("\\r")?,
            _ => write!(f, "{c}")?,
        }
    }
    Ok(())
}

/// `object<TAB>value<TAB>provider<TAB>distance`, with `-` for empty fields
/// and tabs or newlines inside fields written as `\t`, `\n`, `\r`.
impl fmt::Display for Row {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        cell(f, Some(self.object.as_str()))?;
        f.write_str("\t")?;
        cell(f, self.value.as_deref())?;
        f.write_str("\t")?;
        cell(f, self.provider.as_ref().map(ObjectName::as_str))?;
        f.write_str("\t")?;
        match self.distance {
            Some(d) => write!(f, "{d}"),
            None => f.write_str("-"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryResult {
    pub rows: Vec<Row>,
}

impl QueryResult {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// One row per line.
impl fmt::Display for QueryResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

/// Runs `expr` against `kb`. An empty answer is zero rows, not an error.
pub fn execute(kb: &KnowledgeBase, expr: &QueryExpr) -> Result<QueryResult, KbError> {
    let rows = match expr {
        QueryExpr::Attr { object, path } => inference::resolve_attr(kb, object.as_str(), path)?
            .map(|r| Row {
                object: object.clone(),
                value: Some(r.value.to_string()),
                provider: Some(r.provider.clone()),
                distance: Some(r.distance),
            })
            .into_iter()
            .collect(),
        QueryExpr::Ancestors { object } => inference::ancestors(kb, object.as_str())?
            .into_iter()
            .map(|(name, d)| Row { distance: Some(d), ..Row::object(name) })
            .collect(),
        QueryExpr::Instances { class, transitive } => {
            inference::instances_of(kb, class.as_str(), *transitive)?.into_iter().map(Row::object).collect()
        }
        QueryExpr::Find { path, expected } => find(kb, path, expected),
        QueryExpr::Related { object, kind } => kb
            .require(object.as_str())?
            .edges()
            .iter()
            .filter(|e| kind.as_ref().is_none_or(|k| &e.kind == k))
            .map(|e| Row { value: Some(e.kind.label().to_owned()), ..Row::object(&e.target) })
            .collect(),
    };
    Ok(QueryResult { rows })
}

/// Defined objects whose resolved scalar at `path` equals `expected`, both
/// trimmed.
fn find(kb: &KnowledgeBase, path: &[String], expected: &str) -> Vec<Row> {
    let expected = expected.trim();
    kb.objects()
        .filter(|o| !o.is_stub())
        .filter_map(|o| {
            let r = inference::resolve_attr(kb, o.name().as_str(), path).ok()??;
            let scalar = r.value.value()?;
            (scalar.trim() == expected).then(|| Row {
                object: o.name().clone(),
                value: Some(scalar.to_owned()),
                provider: Some(r.provider.clone()),
                distance: Some(r.distance),
            })
        })
        .collect()
}

/// Parses and runs a query in one step.
pub fn run(kb: &KnowledgeBase, text: &str) -> Result<QueryResult, QueryError> {
    let expr = parse_query(text)?;
    Ok(execute(kb, &expr)?)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("syntax error at {0}")]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Kb(#[from] KbError),
}
