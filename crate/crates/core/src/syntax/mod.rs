//! The `.gqms` model language and its canonical formatter.

mod format;
pub(crate) mod lexer;
pub(crate) mod parser;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::span::SourceSpan;

pub use format::format_model;
pub use parser::parse_model;

/// Words that cannot name a declared element.
pub const RESERVED_WORDS: &[&str] = &[
    "goal",
    "strategy",
    "context",
    "assumption",
    "gqm",
    "metric",
    "relation",
    "for",
    "via",
    "when",
    "and",
    "or",
    "not",
    "true",
    "false",
    "satisfied",
    "not_satisfied",
    "undetermined",
    "status",
    "defined",
    "pct_change",
    "abs",
    "min",
    "max",
];

pub fn is_reserved(word: &str) -> bool {
    RESERVED_WORDS.contains(&word)
}

/// `[A-Za-z_][A-Za-z0-9_]*` and not reserved.
pub fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_reserved(word)
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError {
            span,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

/// Quotes `s` as a `.gqms` string literal.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

pub(crate) struct Quoted<'a>(pub &'a str);

impl fmt::Display for Quoted<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&quote(self.0))
    }
}
