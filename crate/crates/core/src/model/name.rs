use std::borrow::Borrow;
use std::fmt;

use crate::error::KbError;

/// Identity of an object in a knowledge base.
///
/// Names are case-sensitive, non-empty and carry no leading or trailing
/// whitespace. Control characters other than tab are rejected so that every
/// name survives a trip through an XMLKR document unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ObjectName(String);

impl ObjectName {
    pub fn new(text: impl Into<String>) -> Result<Self, KbError> {
        let text = text.into();
        check_identifier(&text).map_err(|reason| KbError::InvalidName { name: text.clone(), reason })?;
        Ok(ObjectName(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }
}

impl fmt::Display for ObjectName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ObjectName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for ObjectName {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl TryFrom<&str> for ObjectName {
    type Error = KbError;

    fn try_from(value: &str) -> Result<Self, Self::Error> {
        ObjectName::new(value)
    }
}

impl TryFrom<String> for ObjectName {
    type Error = KbError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        ObjectName::new(value)
    }
}

/// Shared well-formedness rule for object and attribute names.
pub(crate) fn check_identifier(text: &str) -> Result<(), &'static str> {
    if text.trim().is_empty() {
        return Err("name is empty");
    }
    if text.trim() != text {
        return Err("name has leading or trailing whitespace");
    }
    if text.chars().any(|c| c.is_control() && c != '\t') {
        return Err("name contains a control character");
    }
    Ok(())
}
