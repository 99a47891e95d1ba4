use std::fmt;

use crate::analysis;
use crate::model::kb::KnowledgeBase;
use crate::model::name::ObjectName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Info,
    Warn,
    Error,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Info => "INFO",
            Level::Warn => "WARN",
            Level::Error => "ERROR",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FindingCode {
    /// Referenced but never defined.
    StubObject,
    SelfLoop,
    /// Strongly connected group of two or more objects.
    Cycle,
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FindingCode::StubObject => "stub-object",
            FindingCode::SelfLoop => "self-loop",
            FindingCode::Cycle => "cycle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub level: Level,
    pub code: FindingCode,
    pub message: String,
    pub objects: Vec<ObjectName>,
}

impl Finding {
    pub fn new(level: Level, code: FindingCode, message: String, objects: Vec<ObjectName>) -> Self {
        Finding { level, code, message, objects }
    }
}

/// `LEVEL<TAB>CODE<TAB>message`
impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.level, self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.level == Level::Error)
    }

    pub fn count(&self, code: FindingCode) -> usize {
        self.findings.iter().filter(|f| f.code == code).count()
    }
}

/// Lists stubs, self-loops and cycles. Nothing is an error unless `strict`,
/// which turns stub warnings into errors. Cycles are legal and reported as
/// information only.
pub fn validate(kb: &KnowledgeBase, strict: bool) -> ValidationReport {
    let mut findings = Vec::new();
    let stub_level = if strict { Level::Error } else { Level::Warn };

    for node in kb.objects().filter(|o| o.is_stub()) {
        findings.push(Finding::new(
            stub_level,
            FindingCode::StubObject,
            format!("object \"{}\" is referenced but never defined", node.name()),
            vec![node.name().clone()],
        ));
    }

    for edge in kb.edges().filter(|e| e.source == e.target) {
        findings.push(Finding::new(
            Level::Info,
            FindingCode::SelfLoop,
            format!("\"{}\" has a {} edge to itself", edge.source, edge.kind),
            vec![edge.source.clone()],
        ));
    }

    for component in analysis::cycle_groups(kb, |_| true) {
        let listed = component.iter().map(ObjectName::as_str).collect::<Vec<_>>().join(", ");
        findings.push(Finding::new(Level::Info, FindingCode::Cycle, format!("cycle through {listed}"), component));
    }

    ValidationReport { findings }
}
