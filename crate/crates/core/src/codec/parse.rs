use std::collections::HashSet;

use crate::codec::error::{ParseError, ParseErrorKind, Pos};
use crate::codec::reader::{self, Element, Node};
use crate::error::KbError;
use crate::model::{validate, AttributeTree, Finding, KnowledgeBase, ObjectName, RelationKind};

/// Parses an XMLKR document.
///
/// Objects nested inside other objects are hoisted to the top level. A bare
/// nested `<object>` (or `<ref>`) becomes a `contains` edge from its parent;
/// inside `<isa>`, `<ako>` or `<rel>` it is the target of that relation. An
/// `<object>` whose name is still open higher up is read as a reference to it.
///
/// The returned findings are the validation warnings of the resulting
/// knowledge base (stubs, self-loops, cycles).
pub fn parse_document(text: &str) -> Result<(KnowledgeBase, Vec<Finding>), ParseError> {
    let root = reader::read_document(text)?;
    let mut builder = Builder { kb: KnowledgeBase::new(), open: HashSet::new() };
    builder.document(&root)?;
    let findings = validate(&builder.kb, false).findings;
    Ok((builder.kb, findings))
}

/// Like [`parse_document`], reporting invalid UTF-8 as a positioned error.
pub fn parse_document_bytes(bytes: &[u8]) -> Result<(KnowledgeBase, Vec<Finding>), ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_document(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
            let line = 1 + valid.matches('\n').count() as u32;
            let column = 1 + valid.rsplit('\n').next().map_or(0, |l| l.chars().count()) as u32;
            Err(ParseError::new(ParseErrorKind::MalformedXml("input is not valid UTF-8".into()), Pos { line, column }))
        }
    }
}

fn schema(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::Schema(msg.into()), pos)
}

fn kb_error(pos: Pos, err: KbError) -> ParseError {
    let kind = match err {
        KbError::DuplicateObject(n) => ParseErrorKind::DuplicateObject(n),
        KbError::DuplicateAttribute(n) => ParseErrorKind::DuplicateAttribute(n),
        other => ParseErrorKind::Schema(other.to_string()),
    };
    ParseError::new(kind, pos)
}

fn allow_attrs(el: &Element, allowed: &[&str]) -> Result<(), ParseError> {
    match el.attrs.iter().find(|a| !allowed.contains(&a.name.as_str())) {
        Some(a) => Err(schema(a.pos, format!("unexpected attribute `{}` on <{}>", a.name, el.name))),
        None => Ok(()),
    }
}

fn required<'e>(el: &'e Element, name: &str) -> Result<&'e reader::Attribute, ParseError> {
    el.attr(name).ok_or_else(|| schema(el.pos, format!("<{}> requires a `{name}` attribute", el.name)))
}

fn object_name(el: &Element, attr: &str) -> Result<ObjectName, ParseError> {
    let a = required(el, attr)?;
    ObjectName::new(a.value.as_str()).map_err(|e| kb_error(a.pos, e))
}

/// Rejects non-whitespace text directly inside `el`.
fn no_text(el: &Element) -> Result<(), ParseError> {
    for child in &el.children {
        if let Node::Text(t, pos) = child {
            if !t.trim().is_empty() {
                return Err(schema(*pos, format!("unexpected text inside <{}>", el.name)));
            }
        }
    }
    Ok(())
}

fn is_empty(el: &Element) -> bool {
    el.children.iter().all(|c| matches!(c, Node::Text(t, _) if t.trim().is_empty()))
}

struct Builder {
    kb: KnowledgeBase,
    /// Objects whose definition is currently being read.
    open: HashSet<ObjectName>,
}

impl Builder {
    fn document(&mut self, root: &Element) -> Result<(), ParseError> {
        if root.name != "xmlkr" {
            return Err(schema(root.pos, format!("root element must be <xmlkr>, found <{}>", root.name)));
        }
        allow_attrs(root, &["version"])?;
        match root.attr("version") {
            Some(v) if v.value == "1.0" => {}
            other => {
                return Err(ParseError::new(
                    ParseErrorKind::UnknownRootVersion { found: other.map(|a| a.value.clone()) },
                    other.map_or(root.pos, |a| a.pos),
                ))
            }
        }
        no_text(root)?;
        self.reserve_in_document_order(root);
        for el in root.elements() {
            if el.name != "object" {
                return Err(schema(el.pos, format!("expected <object>, found <{}>", el.name)));
            }
            self.object(el)?;
        }
        Ok(())
    }

    /// Slots every defined object in document pre-order before any edge is
    /// added, so a forward reference does not pull its target ahead of
    /// objects defined earlier. Flat export then reproduces the document's
    /// object order and re-export is a fixed point.
    fn reserve_in_document_order(&mut self, root: &Element) {
        let mut stack: Vec<&Element> = root.elements().collect();
        stack.reverse();
        while let Some(el) = stack.pop() {
            if el.name == "object" {
                if let Some(name) = el.attr("name").and_then(|a| ObjectName::new(a.value.as_str()).ok()) {
                    self.kb.reserve(name);
                }
            }
            let at = stack.len();
            stack.extend(el.elements());
            stack[at..].reverse();
        }
    }

    fn object(&mut self, el: &Element) -> Result<ObjectName, ParseError> {
        allow_attrs(el, &["name"])?;
        let name = object_name(el, "name")?;
        if self.open.contains(&name) {
            // cycle stop: a re-opened ancestor only refers back to it
            if !is_empty(el) {
                return Err(ParseError::new(ParseErrorKind::DuplicateObject(name.into_string()), el.pos));
            }
            return Ok(name);
        }
        if self.kb.object(name.as_str()).is_some_and(|o| !o.is_stub()) {
            return Err(ParseError::new(ParseErrorKind::DuplicateObject(name.into_string()), el.pos));
        }
        self.kb.reserve(name.clone());
        self.open.insert(name.clone());

        no_text(el)?;
        let mut attributes: Vec<AttributeTree> = Vec::new();
        let mut edges: Vec<(RelationKind, ObjectName)> = Vec::new();
        for child in el.elements() {
            match child.name.as_str() {
                "attr" => {
                    let attr = self.attribute(child)?;
                    if attributes.iter().any(|a| a.name() == attr.name()) {
                        return Err(ParseError::new(
                            ParseErrorKind::DuplicateAttribute(attr.name().to_owned()),
                            child.pos,
                        ));
                    }
                    attributes.push(attr);
                }
                "isa" | "ako" | "rel" => edges.push(self.relation(child)?),
                "object" => edges.push((RelationKind::contains(), self.object(child)?)),
                "ref" => edges.push((RelationKind::contains(), reference(child)?)),
                other => return Err(schema(child.pos, format!("unexpected element <{other}> inside <object>"))),
            }
        }

        self.open.remove(&name);
        self.kb.add_object(name.clone(), attributes).map_err(|e| kb_error(el.pos, e))?;
        for (kind, target) in edges {
            self.kb.add_relation(name.as_str(), kind, target).map_err(|e| kb_error(el.pos, e))?;
        }
        Ok(name)
    }

    fn attribute(&mut self, el: &Element) -> Result<AttributeTree, ParseError> {
        allow_attrs(el, &["name"])?;
        let name = required(el, "name")?;
        let mut text = String::new();
        let mut children: Vec<AttributeTree> = Vec::new();
        for child in &el.children {
            match child {
                Node::Text(t, _) => text.push_str(t),
                Node::Element(c) if c.name == "attr" => {
                    let sub = self.attribute(c)?;
                    if children.iter().any(|a| a.name() == sub.name()) {
                        return Err(ParseError::new(ParseErrorKind::DuplicateAttribute(sub.name().to_owned()), c.pos));
                    }
                    children.push(sub);
                }
                Node::Element(c) => {
                    return Err(schema(c.pos, format!("unexpected element <{}> inside <attr>", c.name)))
                }
            }
        }
        AttributeTree::new(name.value.as_str(), Some(text), children).map_err(|e| kb_error(el.pos, e))
    }

    fn relation(&mut self, el: &Element) -> Result<(RelationKind, ObjectName), ParseError> {
        let kind = match el.name.as_str() {
            "isa" => {
                allow_attrs(el, &["ref"])?;
                RelationKind::Isa
            }
            "ako" => {
                allow_attrs(el, &["ref"])?;
                RelationKind::Ako
            }
            _ => {
                allow_attrs(el, &["kind", "ref"])?;
                let k = required(el, "kind")?;
                RelationKind::parse(&k.value).map_err(|e| kb_error(k.pos, e))?
            }
        };
        if el.attr("ref").is_some() {
            if !is_empty(el) {
                return Err(schema(el.pos, format!("<{}> with a `ref` attribute must be empty", el.name)));
            }
            return Ok((kind, object_name(el, "ref")?));
        }
        no_text(el)?;
        let mut inner = el.elements();
        let (Some(target), None) = (inner.next(), inner.next()) else {
            return Err(schema(
                el.pos,
                format!("<{}> needs a `ref` attribute or exactly one <object> or <ref> inside", el.name),
            ));
        };
        let target = match target.name.as_str() {
            "object" => self.object(target)?,
            "ref" => reference(target)?,
            other => return Err(schema(target.pos, format!("unexpected element <{other}> inside <{}>", el.name))),
        };
        Ok((kind, target))
    }
}

/// `<ref name="..."/>`
fn reference(el: &Element) -> Result<ObjectName, ParseError> {
    allow_attrs(el, &["name"])?;
    if !is_empty(el) {
        return Err(schema(el.pos, "<ref> must be empty"));
    }
    object_name(el, "name")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FindingCode;

    const PERSIA: &str = r#"<xmlkr version="1.0">
  <object name="Persia">
    <attr name="color">White</attr>
    <isa ref="Car"/>
  </object>
</xmlkr>
"#;

    fn kind_of(text: &str) -> ParseErrorKind {
        parse_document(text).unwrap_err().kind
    }

    #[test]
    fn persia_document() {
        let (kb, warnings) = parse_document(PERSIA).unwrap();
        assert_eq!(kb.object_count(), 2);
        assert_eq!(kb.get_local_attr("Persia", &["color"]).unwrap().unwrap().value(), Some("White"));
        assert_eq!(kb.neighbors("Persia", Some(&RelationKind::Isa)).unwrap()[0].as_str(), "Car");
        assert!(kb.object("Car").unwrap().is_stub());
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, FindingCode::StubObject);
    }

    #[test]
    fn empty_document() {
        let (kb, warnings) = parse_document(r#"<xmlkr version="1.0"/>"#).unwrap();
        assert!(kb.is_empty());
        assert!(warnings.is_empty());
        let (kb, _) =
            parse_document("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<xmlkr version=\"1.0\">\n</xmlkr>").unwrap();
        assert!(kb.is_empty());
    }

    #[test]
    fn root_version_checked() {
        assert_eq!(
            kind_of(r#"<xmlkr version="2.0"/>"#),
            ParseErrorKind::UnknownRootVersion { found: Some("2.0".into()) }
        );
        assert_eq!(kind_of("<xmlkr/>"), ParseErrorKind::UnknownRootVersion { found: None });
        assert!(matches!(kind_of(r#"<kb version="1.0"/>"#), ParseErrorKind::Schema(_)));
    }

    #[test]
    fn duplicates_rejected_with_position() {
        let dup = "<xmlkr version=\"1.0\">\n<object name=\"a\"/>\n<object name=\"a\"/>\n</xmlkr>";
        let e = parse_document(dup).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::DuplicateObject("a".into()));
        assert_eq!((e.pos.line, e.pos.column), (3, 1));

        let dup_attr =
            r#"<xmlkr version="1.0"><object name="a"><attr name="x">1</attr><attr name="x">2</attr></object></xmlkr>"#;
        assert_eq!(kind_of(dup_attr), ParseErrorKind::DuplicateAttribute("x".into()));
        let dup_nested = r#"<xmlkr version="1.0"><object name="a"><attr name="g"><attr name="c">1</attr><attr name="c">1</attr></attr></object></xmlkr>"#;
        assert_eq!(kind_of(dup_nested), ParseErrorKind::DuplicateAttribute("c".into()));
    }

    #[test]
    fn nested_attributes_with_mixed_content() {
        let doc = r#"<xmlkr version="1.0"><object name="bird">
            <attr name="food">grain</attr>
            <attr name="grain">seed
              <attr name="color">brown</attr>
            </attr>
        </object></xmlkr>"#;
        let (kb, _) = parse_document(doc).unwrap();
        let grain = kb.get_local_attr("bird", &["grain"]).unwrap().unwrap();
        assert_eq!(grain.value(), Some("seed"));
        assert_eq!(kb.get_local_attr("bird", &["grain", "color"]).unwrap().unwrap().value(), Some("brown"));
    }

    #[test]
    fn loop_document_gives_cycle_warning() {
        let doc = r#"<xmlkr version="1.0">
  <object name="A"><rel kind="linked-to" ref="B"/></object>
  <object name="B"><rel kind="linked-to" ref="C"/></object>
  <object name="C"><rel kind="linked-to" ref="A"/></object>
</xmlkr>"#;
        let (kb, warnings) = parse_document(doc).unwrap();
        assert_eq!(kb.object_count(), 3);
        assert_eq!(kb.neighbors("C", None).unwrap()[0].as_str(), "A");
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].code, FindingCode::Cycle);
    }

    #[test]
    fn bare_nesting_uses_contains_and_stop_rule() {
        // the A/B/C listing written with bare nesting
        let doc = r#"<xmlkr version="1.0">
  <object name="A"><object name="B"><object name="C"><object name="A"/></object></object></object>
</xmlkr>"#;
        let (kb, _) = parse_document(doc).unwrap();
        let contains = RelationKind::contains();
        assert_eq!(kb.neighbors("A", Some(&contains)).unwrap()[0].as_str(), "B");
        assert_eq!(kb.neighbors("B", Some(&contains)).unwrap()[0].as_str(), "C");
        assert_eq!(kb.neighbors("C", Some(&contains)).unwrap()[0].as_str(), "A");
        assert!(kb.objects().all(|o| !o.is_stub()));
        // object order is the order in which definitions open
        let names: Vec<_> = kb.names().map(|n| n.as_str()).collect();
        assert_eq!(names, ["A", "B", "C"]);
    }

    #[test]
    fn reopened_ancestor_with_content_is_a_duplicate() {
        let doc = r#"<xmlkr version="1.0"><object name="A"><object name="A"><attr name="x">1</attr></object></object></xmlkr>"#;
        assert_eq!(kind_of(doc), ParseErrorKind::DuplicateObject("A".into()));
    }

    #[test]
    fn inline_relation_targets() {
        let doc = r#"<xmlkr version="1.0">
  <object name="rabbit">
    <ako><object name="mammal"><attr name="legs">4</attr><rel kind="PART-OF"><ref name="rabbit"/></rel></object></ako>
    <rel kind="kind-of" ref="animal"/>
  </object>
</xmlkr>"#;
        let (kb, _) = parse_document(doc).unwrap();
        let r = kb.object("rabbit").unwrap();
        assert_eq!(r.edges().len(), 2);
        assert_eq!(r.edges()[0].kind, RelationKind::Ako);
        assert_eq!(r.edges()[1].kind, RelationKind::Ako);
        assert_eq!(r.edges()[1].target.as_str(), "animal");
        let m = kb.object("mammal").unwrap();
        assert_eq!(m.edges()[0].kind.label(), "part-of");
        assert_eq!(m.edges()[0].target.as_str(), "rabbit");
    }

    #[test]
    fn schema_violations_have_positions() {
        let cases = [
            r#"<xmlkr version="1.0"><thing/></xmlkr>"#,
            r#"<xmlkr version="1.0">text</xmlkr>"#,
            r#"<xmlkr version="1.0"><object/></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name=" "/></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a" id="1"/></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><attr name="x"/></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><rel ref="b"/></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><rel kind="has part" ref="b"/></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><isa/></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><isa ref="b"><ref name="c"/></isa></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><isa><ref name="b"/><ref name="c"/></isa></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><ref name="b">x</ref></object></xmlkr>"#,
            r#"<xmlkr version="1.0"><object name="a"><attr name="x"><isa ref="b"/></attr></object></xmlkr>"#,
        ];
        for doc in cases {
            let e = parse_document(doc).unwrap_err();
            assert!(matches!(e.kind, ParseErrorKind::Schema(_)), "{doc}: {e}");
            assert!(e.pos.line >= 1 && e.pos.column > 1, "{doc}: {e}");
        }
    }

    #[test]
    fn invalid_utf8_position() {
        let e = parse_document_bytes(b"<xmlkr version=\"1.0\">\n  <\xff").unwrap_err();
        assert_eq!((e.pos.line, e.pos.column), (2, 4));
    }

    #[test]
    fn stub_promoted_by_later_definition() {
        let doc = r#"<xmlkr version="1.0">
  <object name="Persia"><isa ref="Car"/></object>
  <object name="Car"><attr name="wheels">4</attr></object>
</xmlkr>"#;
        let (kb, warnings) = parse_document(doc).unwrap();
        assert!(!kb.object("Car").unwrap().is_stub());
        assert!(warnings.is_empty());
    }
}
