use std::fmt;

use thiserror::Error;

use crate::model::{ObjectName, RelationKind};
use crate::query::QueryExpr;

/// Query text that does not follow the grammar.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: expected {}, found {found}", expected.join(" or "))]
pub struct SyntaxError {
    /// 1-based character column.
    pub column: usize,
    /// Byte offset into the query text.
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

const KEYWORDS: [&str; 5] = ["attr", "ancestors", "instances", "find", "related"];

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !matches!(c, '.' | '=' | '"')
}

struct Parser<'a> {
    src: &'a str,
    at: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.at..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.at = self.src.len() - trimmed.len();
    }

    fn found(&self) -> String {
        match self.rest().chars().next() {
            None => "end of input".into(),
            Some(c) if is_word_char(c) => {
                let w: String = self.rest().chars().take_while(|&c| is_word_char(c)).take(32).collect();
                format!("`{w}`")
            }
            Some(c) => format!("`{}`", c.escape_default()),
        }
    }

    fn error_at(&self, offset: usize, expected: &[&str], found: String) -> SyntaxError {
        SyntaxError {
            column: 1 + self.src[..offset].chars().count(),
            offset,
            expected: expected.iter().map(|s| (*s).to_owned()).collect(),
            found,
        }
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        self.error_at(self.at, expected, self.found())
    }

    fn peek_word(&self) -> Option<&'a str> {
        let len: usize = self.rest().chars().take_while(|&c| is_word_char(c)).map(char::len_utf8).sum();
        (len > 0).then(|| &self.rest()[..len])
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.at += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.peek_word() == Some(kw) {
            self.at += kw.len();
            true
        } else {
            false
        }
    }

    /// `"..."` with `\"` and `\\` escapes; the cursor is on the opening quote.
    fn quoted(&mut self) -> Result<String, SyntaxError> {
        let start = self.at;
        let mut out = String::new();
        let mut chars = self.rest().char_indices().skip(1);
        while let Some((i, c)) = chars.next() {
            match c {
                '"' => {
                    self.at = start + i + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, e)) => out.push(e),
                    None => break,
                },
                _ => out.push(c),
            }
        }
        Err(self.error_at(start, &["closing `\"`"], "end of input".into()))
    }

    /// A bare word or a quoted string. Returns the text and its offset.
    fn token(&mut self, what: &str) -> Result<(String, usize), SyntaxError> {
        self.skip_ws();
        let start = self.at;
        if self.rest().starts_with('"') {
            return Ok((self.quoted()?, start));
        }
        match self.peek_word() {
            Some(w) => {
                self.at += w.len();
                Ok((w.to_owned(), start))
            }
            None => Err(self.error(&[what])),
        }
    }

    fn object_name(&mut self) -> Result<ObjectName, SyntaxError> {
        let (text, at) = self.token("object name")?;
        ObjectName::new(text.as_str()).map_err(|_| self.error_at(at, &["object name"], format!("{text:?}")))
    }

    fn segment(&mut self) -> Result<String, SyntaxError> {
        let (text, at) = self.token("attribute name")?;
        match crate::model::name_check(&text) {
            Ok(()) => Ok(text),
            Err(_) => Err(self.error_at(at, &["attribute name"], format!("{text:?}"))),
        }
    }

    fn path_tail(&mut self) -> Result<Vec<String>, SyntaxError> {
        let mut path = Vec::new();
        while self.eat('.') {
            path.push(self.segment()?);
        }
        Ok(path)
    }

    /// Everything after `=` in `find`: a quoted string or the next
    /// whitespace-free run of characters.
    fn value(&mut self) -> Result<String, SyntaxError> {
        self.skip_ws();
        if self.rest().starts_with('"') {
            return self.quoted();
        }
        let len: usize = self.rest().chars().take_while(|c| !c.is_whitespace()).map(char::len_utf8).sum();
        if len == 0 {
            return Err(self.error(&["value"]));
        }
        let v = self.rest()[..len].to_owned();
        self.at += len;
        Ok(v)
    }

    fn end(&mut self, also: &[&str]) -> Result<(), SyntaxError> {
        self.skip_ws();
        if self.at == self.src.len() {
            return Ok(());
        }
        let mut expected = also.to_vec();
        expected.push("end of input");
        Err(self.error(&expected))
    }

    fn query(&mut self) -> Result<QueryExpr, SyntaxError> {
        self.skip_ws();
        let Some(kw) = self.peek_word().filter(|w| KEYWORDS.contains(w)) else {
            return Err(self.error(&KEYWORDS));
        };
        self.at += kw.len();
        let expr = match kw {
            "attr" => {
                let object = self.object_name()?;
                self.skip_ws();
                if !self.rest().starts_with('.') {
                    return Err(self.error(&["`.`"]));
                }
                let path = self.path_tail()?;
                self.end(&["`.`"])?;
                QueryExpr::Attr { object, path }
            }
            "ancestors" => {
                let object = self.object_name()?;
                self.end(&[])?;
                QueryExpr::Ancestors { object }
            }
            "instances" => {
                let class = self.object_name()?;
                let transitive = self.eat_keyword("transitive");
                self.end(if transitive { &[] } else { &["`transitive`"] })?;
                QueryExpr::Instances { class, transitive }
            }
            "find" => {
                let mut path = vec![self.segment()?];
                path.extend(self.path_tail()?);
                if !self.eat('=') {
                    return Err(self.error(&["`.`", "`=`"]));
                }
                let expected = self.value()?;
                self.end(&[])?;
                QueryExpr::Find { path, expected }
            }
            _ => {
                let object = self.object_name()?;
                let kind = if self.eat_keyword("kind") {
                    if !self.eat('=') {
                        return Err(self.error(&["`=`"]));
                    }
                    self.skip_ws();
                    let at = self.at;
                    let label = self.peek_word().ok_or_else(|| self.error(&["relation label"]))?;
                    self.at += label.len();
                    let kind = RelationKind::parse(label)
                        .map_err(|_| self.error_at(at, &["relation label"], format!("`{label}`")))?;
                    Some(kind)
                } else {
                    None
                };
                self.end(if kind.is_some() { &[] } else { &["`kind`"] })?;
                QueryExpr::Related { object, kind }
            }
        };
        Ok(expr)
    }
}

/// Parses one query.
///
/// ```text
/// query      := "attr" dotted | "ancestors" NAME | "instances" NAME ["transitive"]
///             | "find" dottedpath "=" VALUE | "related" NAME ["kind" "=" LABEL]
/// dotted     := NAME ("." NAME)+
/// dottedpath := NAME ("." NAME)*
/// ```
/// Names are bare words or double-quoted strings; a bare VALUE runs to the
/// next whitespace.
pub fn parse_query(text: &str) -> Result<QueryExpr, SyntaxError> {
    Parser { src: text, at: 0 }.query()
}

/// Like [`parse_query`], rejecting invalid UTF-8 at its position.
pub fn parse_query_bytes(bytes: &[u8]) -> Result<QueryExpr, SyntaxError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_query(text),
        Err(e) => {
            let valid = std::str::from_utf8(&bytes[..e.valid_up_to()]).expect("valid prefix");
            Err(SyntaxError {
                column: 1 + valid.chars().count(),
                offset: e.valid_up_to(),
                expected: vec!["valid UTF-8".into()],
                found: format!("byte 0x{:02x}", bytes[e.valid_up_to()]),
            })
        }
    }
}

fn write_token(f: &mut fmt::Formatter<'_>, text: &str, bare: bool) -> fmt::Result {
    if bare {
        return f.write_str(text);
    }
    f.write_str("\"")?;
    for c in text.chars() {
        if matches!(c, '"' | '\\') {
            f.write_str("\\")?;
        }
        write!(f, "{c}")?;
    }
    f.write_str("\"")
}

fn write_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    write_token(f, name, !name.is_empty() && name.chars().all(is_word_char))
}

fn write_value(f: &mut fmt::Formatter<'_>, value: &str) -> fmt::Result {
    write_token(f, value, !value.is_empty() && !value.starts_with('"') && !value.chars().any(char::is_whitespace))
}

/// Renders the expression back to query text that parses to an equal
/// expression.
impl fmt::Display for QueryExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueryExpr::Attr { object, path } => {
                f.write_str("attr ")?;
                write_name(f, object.as_str())?;
                for seg in path {
                    f.write_str(".")?;
                    write_name(f, seg)?;
                }
                Ok(())
            }
            QueryExpr::Ancestors { object } => {
                f.write_str("ancestors ")?;
                write_name(f, object.as_str())
            }
            QueryExpr::Instances { class, transitive } => {
                f.write_str("instances ")?;
                write_name(f, class.as_str())?;
                if *transitive {
                    f.write_str(" transitive")?;
                }
                Ok(())
            }
            QueryExpr::Find { path, expected } => {
                f.write_str("find ")?;
                for (i, seg) in path.iter().enumerate() {
                    if i > 0 {
                        f.write_str(".")?;
                    }
                    write_name(f, seg)?;
                }
                f.write_str("=")?;
                write_value(f, expected)
            }
            QueryExpr::Related { object, kind } => {
                f.write_str("related ")?;
                write_name(f, object.as_str())?;
                if let Some(kind) = kind {
                    write!(f, " kind={kind}")?;
                }
                Ok(())
            }
        }
    }
}
