//! Reusable goal/strategy/plan templates (`.gqmp` files).
//!
//! A pattern file is a TOML header, a line holding only `---`, and a `.gqms`
//! body with `${name}` placeholders:
//!
//! ```text
//! id = "growth-skeleton"
//! title = "Growth goal"
//! goal_type = "growth"
//!
//! [[params]]
//! name = "goal"
//! description = "Goal identifier"
//! default = "G1"
//! kind = "ident"
//! ---
//! goal ${goal} { ... }
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::model::GoalType;
use crate::syntax::is_identifier;

const BUILTIN: [(&str, &str); 5] = [
    (
        "growth-skeleton.gqmp",
        include_str!("../../patterns/growth-skeleton.gqmp"),
    ),
    (
        "success-skeleton.gqmp",
        include_str!("../../patterns/success-skeleton.gqmp"),
    ),
    (
        "maintenance-skeleton.gqmp",
        include_str!("../../patterns/maintenance-skeleton.gqmp"),
    ),
    (
        "specific-focus-skeleton.gqmp",
        include_str!("../../patterns/specific-focus-skeleton.gqmp"),
    ),
    ("abc-profit.gqmp", include_str!("../../patterns/abc-profit.gqmp")),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    /// Free text, placed inside a string literal; quotes and backslashes are escaped.
    Text,
    /// An identifier that is not a reserved word.
    Ident,
    /// A non-negative decimal literal such as `20000` or `1.15`.
    Number,
}

impl ParamKind {
    pub fn name(self) -> &'static str {
        match self {
            ParamKind::Text => "text",
            ParamKind::Ident => "ident",
            ParamKind::Number => "number",
        }
    }

    fn accepts(self, value: &str) -> bool {
        match self {
            ParamKind::Text => !value.trim().is_empty(),
            ParamKind::Ident => is_identifier(value),
            ParamKind::Number => {
                let mut parts = value.splitn(2, '.');
                let int = parts.next().unwrap_or("");
                let frac = parts.next();
                !int.is_empty()
                    && int.bytes().all(|b| b.is_ascii_digit())
                    && frac.is_none_or(|f| !f.is_empty() && f.bytes().all(|b| b.is_ascii_digit()))
            }
        }
    }

    fn substitute(self, value: &str) -> String {
        match self {
            ParamKind::Text => value.replace('\\', "\\\\").replace('"', "\\\""),
            _ => value.to_string(),
        }
    }
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Param {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub default: Option<String>,
    #[serde(default = "default_kind")]
    pub kind: ParamKind,
}

fn default_kind() -> ParamKind {
    ParamKind::Text
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    id: String,
    title: String,
    goal_type: String,
    #[serde(default)]
    params: Vec<Param>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    pub id: String,
    pub title: String,
    pub goal_type: GoalType,
    pub params: Vec<Param>,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{origin}: {message}")]
pub struct PatternError {
    pub origin: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("unbound: {0}")]
    Unbound(String),
    #[error("unknown parameter: {0}")]
    UnknownParam(String),
    #[error("invalid value for {name} (expected {kind}): {value:?}")]
    InvalidValue {
        name: String,
        kind: ParamKind,
        value: String,
    },
}

fn is_name(word: &str) -> bool {
    let mut chars = word.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Placeholder names in order of first appearance, or the byte offset of an
/// unterminated or malformed `${`.
fn placeholders(body: &str) -> Result<Vec<&str>, usize> {
    let mut out: Vec<&str> = Vec::new();
    let mut rest = body;
    let mut offset = 0;
    while let Some(i) = rest.find("${") {
        let after = &rest[i + 2..];
        let end = after.find('}').ok_or(offset + i)?;
        let name = &after[..end];
        if !is_name(name) {
            return Err(offset + i);
        }
        if !out.contains(&name) {
            out.push(name);
        }
        offset += i + 2 + end + 1;
        rest = &after[end + 1..];
    }
    Ok(out)
}

impl Pattern {
    /// Parses a `.gqmp` file; `origin` names it in errors.
    pub fn parse(text: &str, origin: &str) -> Result<Pattern, PatternError> {
        let err = |message: String| PatternError {
            origin: origin.to_string(),
            message,
        };
        let mut header = String::new();
        let mut body = None;
        let mut lines = text.split_inclusive('\n');
        for line in lines.by_ref() {
            if line.trim_end() == "---" {
                body = Some(lines.collect::<String>());
                break;
            }
            header.push_str(line);
        }
        let body = body.ok_or_else(|| err("missing `---` line after the header".into()))?;
        let header: Header = toml::from_str(&header).map_err(|e| err(e.message().to_string()))?;

        if header.id.is_empty()
            || !header
                .id
                .bytes()
                .all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
        {
            return Err(err(format!("invalid pattern id {:?}", header.id)));
        }
        let goal_type = GoalType::from_keyword(&header.goal_type)
            .ok_or_else(|| err(format!("unknown goal type `{}`", header.goal_type)))?;
        let mut names = HashSet::new();
        for p in &header.params {
            if !is_name(&p.name) {
                return Err(err(format!("invalid parameter name {:?}", p.name)));
            }
            if !names.insert(p.name.as_str()) {
                return Err(err(format!("parameter `{}` declared twice", p.name)));
            }
            if let Some(d) = &p.default {
                if !p.kind.accepts(d) {
                    return Err(err(format!("default of `{}` is not a valid {}", p.name, p.kind)));
                }
            }
        }
        let used = placeholders(&body).map_err(|_| err("malformed `${` placeholder in body".into()))?;
        if let Some(missing) = used.iter().find(|n| !names.contains(*n)) {
            return Err(err(format!("placeholder `{missing}` has no parameter")));
        }
        Ok(Pattern {
            id: header.id,
            title: header.title,
            goal_type,
            params: header.params,
            body,
        })
    }

    pub fn param(&self, name: &str) -> Option<&Param> {
        self.params.iter().find(|p| p.name == name)
    }
}

/// Fills in `binding` (falling back to defaults) and returns the `.gqms` text.
/// All problems are reported together: unknown keys, invalid values, and
/// parameters left unbound.
pub fn instantiate(pattern: &Pattern, binding: &BTreeMap<String, String>) -> Result<String, Vec<InstantiateError>> {
    let mut errors = Vec::new();
    for (name, value) in binding {
        match pattern.param(name) {
            None => errors.push(InstantiateError::UnknownParam(name.clone())),
            Some(p) if !p.kind.accepts(value) => errors.push(InstantiateError::InvalidValue {
                name: name.clone(),
                kind: p.kind,
                value: value.clone(),
            }),
            Some(_) => {}
        }
    }
    let mut values = BTreeMap::new();
    for p in &pattern.params {
        match binding.get(&p.name).or(p.default.as_ref()) {
            Some(v) => {
                values.insert(p.name.as_str(), p.kind.substitute(v));
            }
            None => errors.push(InstantiateError::Unbound(p.name.clone())),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }

    let mut out = String::with_capacity(pattern.body.len());
    let mut rest = pattern.body.as_str();
    while let Some(i) = rest.find("${") {
        out.push_str(&rest[..i]);
        let after = &rest[i + 2..];
        let end = after.find('}').expect("placeholders were checked at load");
        out.push_str(&values[&after[..end]]);
        rest = &after[end + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// Patterns in file-name order, plus a warning for every file that could not
/// be used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    pub patterns: Vec<Pattern>,
    pub warnings: Vec<PatternError>,
}

impl Catalog {
    pub fn get(&self, id: &str) -> Option<&Pattern> {
        self.patterns.iter().find(|p| p.id == id)
    }

    fn from_sources<'a>(sources: impl IntoIterator<Item = (String, &'a str)>) -> Catalog {
        let mut catalog = Catalog::default();
        for (origin, text) in sources {
            match Pattern::parse(text, &origin) {
                Ok(p) if catalog.get(&p.id).is_some() => catalog.warnings.push(PatternError {
                    origin,
                    message: format!("duplicate pattern id `{}` ignored", p.id),
                }),
                Ok(p) => catalog.patterns.push(p),
                Err(e) => catalog.warnings.push(e),
            }
        }
        catalog
    }
}

/// The catalog compiled into the binary.
pub fn builtin_catalog() -> Catalog {
    Catalog::from_sources(BUILTIN.iter().map(|(name, text)| (format!("builtin:{name}"), *text)))
}

/// Loads every `*.gqmp` file in `dir`. Malformed files become warnings;
/// only an unreadable directory is an error.
pub fn list_patterns(dir: &Path) -> io::Result<Catalog> {
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "gqmp") && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    let mut texts = Vec::new();
    let mut unreadable = Vec::new();
    for path in paths {
        match fs::read_to_string(&path) {
            Ok(text) => texts.push((path.display().to_string(), text)),
            Err(e) => unreadable.push(PatternError {
                origin: path.display().to_string(),
                message: e.to_string(),
            }),
        }
    }
    let mut catalog = Catalog::from_sources(texts.iter().map(|(o, t)| (o.clone(), t.as_str())));
    catalog.warnings.extend(unreadable);
    Ok(catalog)
}
