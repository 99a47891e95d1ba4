//! Minimal XML reader: elements, attributes, text, comments and an optional
//! XML declaration. No DTDs, namespaces, CDATA, processing instructions or
//! entities beyond the five predefined ones.

use crate::codec::error::{ParseError, ParseErrorKind, Pos};

/// Element nesting limit. Everything the serializers emit stays well below it.
pub const MAX_DEPTH: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Attribute {
    pub name: String,
    pub value: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Element {
    pub name: String,
    pub attrs: Vec<Attribute>,
    pub children: Vec<Node>,
    pub pos: Pos,
}

impl Element {
    pub fn attr(&self, name: &str) -> Option<&Attribute> {
        self.attrs.iter().find(|a| a.name == name)
    }

    pub fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|c| match c {
            Node::Element(e) => Some(e),
            Node::Text(..) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Node {
    Element(Element),
    Text(String, Pos),
}

struct Cursor<'a> {
    src: &'a str,
    at: usize,
    line: u32,
    col: u32,
}

fn malformed(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::MalformedXml(msg.into()), pos)
}

impl<'a> Cursor<'a> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, column: self.col }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.at..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.at += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn advance(&mut self, s: &str) {
        debug_assert!(self.starts_with(s));
        for _ in s.chars() {
            self.bump();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.bump();
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.starts_with(s) {
            self.advance(s);
            Ok(())
        } else {
            Err(malformed(self.pos(), format!("expected `{s}`")))
        }
    }

    /// Consumes a character, rejecting those XML forbids.
    fn take_char(&mut self) -> Result<char, ParseError> {
        let pos = self.pos();
        match self.bump() {
            None => Err(malformed(pos, "unexpected end of input")),
            Some(c) if c.is_control() && !matches!(c, '\t' | '\n' | '\r') => {
                Err(malformed(pos, format!("illegal character U+{:04X}", c as u32)))
            }
            Some(c) => Ok(c),
        }
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let pos = self.pos();
        let start = self.at;
        match self.peek() {
            Some(c) if c == '_' || c.is_alphabetic() => {
                self.bump();
            }
            Some(':') => return Err(malformed(pos, "namespaces are not supported")),
            _ => return Err(malformed(pos, "expected a name")),
        }
        while let Some(c) = self.peek() {
            if c == ':' {
                return Err(malformed(self.pos(), "namespaces are not supported"));
            }
            if c == '_' || c == '-' || c == '.' || c.is_alphanumeric() {
                self.bump();
            } else {
                break;
            }
        }
        Ok(self.src[start..self.at].to_owned())
    }

    fn entity(&mut self) -> Result<char, ParseError> {
        let pos = self.pos();
        self.expect("&")?;
        for (name, ch) in [("lt;", '<'), ("gt;", '>'), ("amp;", '&'), ("quot;", '"'), ("apos;", '\'')] {
            if self.starts_with(name) {
                self.advance(name);
                return Ok(ch);
            }
        }
        if self.starts_with("#") {
            return self.char_ref(pos);
        }
        Err(malformed(pos, "unsupported entity reference"))
    }

    /// `&#NNN;` or `&#xHH;`, after the `&`. The character must be one XML
    /// allows, which excludes most C0 controls.
    fn char_ref(&mut self, pos: Pos) -> Result<char, ParseError> {
        self.advance("#");
        let radix = if self.starts_with("x") {
            self.advance("x");
            16
        } else {
            10
        };
        let start = self.at;
        while self.peek().is_some_and(|c| c.is_digit(radix)) {
            self.bump();
        }
        let digits = &self.src[start..self.at];
        if digits.is_empty() || !self.starts_with(";") {
            return Err(malformed(pos, "malformed character reference"));
        }
        self.advance(";");
        u32::from_str_radix(digits, radix)
            .ok()
            .and_then(char::from_u32)
            .filter(|&c| !c.is_control() || matches!(c, '\t' | '\n' | '\r'))
            .ok_or_else(|| malformed(pos, "character reference to a character XML does not allow"))
    }

    fn comment(&mut self) -> Result<(), ParseError> {
        let pos = self.pos();
        self.expect("<!--")?;
        loop {
            if self.starts_with("-->") {
                self.advance("-->");
                return Ok(());
            }
            if self.peek().is_none() {
                return Err(malformed(pos, "unterminated comment"));
            }
            self.take_char()?;
        }
    }

    /// Whitespace and comments between top-level constructs.
    fn misc(&mut self) -> Result<(), ParseError> {
        loop {
            self.skip_ws();
            if self.starts_with("<!--") {
                self.comment()?;
            } else {
                return Ok(());
            }
        }
    }

    fn xml_declaration(&mut self) -> Result<(), ParseError> {
        let pos = self.pos();
        self.expect("<?xml")?;
        if !matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            return Err(malformed(pos, "processing instructions are not supported"));
        }
        loop {
            if self.starts_with("?>") {
                self.advance("?>");
                return Ok(());
            }
            if self.peek().is_none() {
                return Err(malformed(pos, "unterminated XML declaration"));
            }
            self.take_char()?;
        }
    }

    fn attr_value(&mut self) -> Result<String, ParseError> {
        let pos = self.pos();
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(malformed(pos, "expected a quoted attribute value")),
        };
        self.bump();
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(malformed(pos, "unterminated attribute value")),
                Some(c) if c == quote => {
                    self.bump();
                    return Ok(value);
                }
                Some('<') => return Err(malformed(self.pos(), "`<` in attribute value")),
                Some('&') => value.push(self.entity()?),
                Some(_) => value.push(self.take_char()?),
            }
        }
    }

    /// Reads `<name attr="v" ...` up to and including `>` or `/>`.
    /// Returns the element shell and whether it was self-closing.
    fn start_tag(&mut self) -> Result<(Element, bool), ParseError> {
        let pos = self.pos();
        self.expect("<")?;
        let name = self.name()?;
        let mut attrs: Vec<Attribute> = Vec::new();
        loop {
            let had_ws = matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n'));
            self.skip_ws();
            if self.starts_with("/>") {
                self.advance("/>");
                return Ok((Element { name, attrs, children: Vec::new(), pos }, true));
            }
            if self.starts_with(">") {
                self.advance(">");
                return Ok((Element { name, attrs, children: Vec::new(), pos }, false));
            }
            if self.peek().is_none() {
                return Err(malformed(pos, format!("unterminated start tag <{name}>")));
            }
            if !had_ws {
                return Err(malformed(self.pos(), "expected whitespace, `>` or `/>`"));
            }
            let apos = self.pos();
            let aname = self.name()?;
            self.skip_ws();
            self.expect("=")?;
            self.skip_ws();
            let value = self.attr_value()?;
            if attrs.iter().any(|a| a.name == aname) {
                return Err(malformed(apos, format!("attribute `{aname}` repeated on <{name}>")));
            }
            attrs.push(Attribute { name: aname, value, pos: apos });
        }
    }
}

/// Parses `src` into its root element.
pub(crate) fn read_document(src: &str) -> Result<Element, ParseError> {
    let mut cur = Cursor { src, at: 0, line: 1, col: 1 };
    if cur.starts_with("\u{FEFF}") {
        cur.at += '\u{FEFF}'.len_utf8();
    }
    if cur.starts_with("<?xml") {
        cur.xml_declaration()?;
    }
    cur.misc()?;
    reject_unsupported(&cur)?;
    if !cur.starts_with("<") {
        return Err(match cur.peek() {
            None => malformed(cur.pos(), "document has no root element"),
            Some(_) => malformed(cur.pos(), "expected the root element"),
        });
    }

    // Open elements; the last one receives parsed children.
    let mut stack: Vec<Element> = Vec::new();
    let root = loop {
        if stack.is_empty() {
            let (el, closed) = cur.start_tag()?;
            if closed {
                break el;
            }
            stack.push(el);
            continue;
        }
        let text_pos = cur.pos();
        let mut text = String::new();
        while let Some(c) = cur.peek() {
            match c {
                '<' => break,
                '&' => text.push(cur.entity()?),
                _ => text.push(cur.take_char()?),
            }
        }
        if !text.is_empty() {
            stack.last_mut().expect("open element").children.push(Node::Text(text, text_pos));
        }
        if cur.peek().is_none() {
            let open = stack.last().expect("open element");
            return Err(malformed(open.pos, format!("element <{}> is never closed", open.name)));
        }
        if cur.starts_with("</") {
            let pos = cur.pos();
            cur.advance("</");
            let name = cur.name()?;
            cur.skip_ws();
            cur.expect(">")?;
            let el = stack.pop().expect("open element");
            if el.name != name {
                return Err(malformed(
                    pos,
                    format!("closing tag </{name}> does not match <{}> opened at {}", el.name, el.pos),
                ));
            }
            match stack.last_mut() {
                Some(parent) => parent.children.push(Node::Element(el)),
                None => break el,
            }
        } else if cur.starts_with("<!--") {
            cur.comment()?;
        } else {
            reject_unsupported(&cur)?;
            let pos = cur.pos();
            let (el, closed) = cur.start_tag()?;
            if closed {
                stack.last_mut().expect("open element").children.push(Node::Element(el));
            } else {
                if stack.len() >= MAX_DEPTH {
                    return Err(malformed(pos, format!("elements nested deeper than {MAX_DEPTH} levels")));
                }
                stack.push(el);
            }
        }
    };

    cur.misc()?;
    if cur.peek().is_some() {
        return Err(malformed(cur.pos(), "content after the root element"));
    }
    Ok(root)
}

fn reject_unsupported(cur: &Cursor<'_>) -> Result<(), ParseError> {
    let what = if cur.starts_with("<!DOCTYPE") {
        "document type declarations are not supported"
    } else if cur.starts_with("<![CDATA[") {
        "CDATA sections are not supported"
    } else if cur.starts_with("<?") {
        "processing instructions are not supported"
    } else if cur.starts_with("<!") {
        "markup declarations are not supported"
    } else {
        return Ok(());
    };
    Err(malformed(cur.pos(), what))
}
