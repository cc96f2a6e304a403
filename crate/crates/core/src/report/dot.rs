use std::collections::HashSet;
use std::fmt::Write;

use thiserror::Error;

use crate::eval::EvaluationReport;
use crate::expr::GoalStatus;
use crate::model::{Model, RelationTarget};
use crate::report::{forest, plan_count, ForestItem};

const ATTRIBUTES: [&str; 4] = ["shape", "label", "style", "fillcolor"];

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn fill(status: GoalStatus) -> &'static str {
    match status {
        GoalStatus::Satisfied => "palegreen",
        GoalStatus::NotSatisfied => "lightcoral",
        GoalStatus::Undetermined => "lightgray",
    }
}

/// Goals as boxes, strategies as ellipses, derivation edges solid and goal
/// relations dashed. With a report, goal boxes are filled by status.
pub fn render_dot(model: &Model, report: Option<&EvaluationReport>) -> String {
    let mut out = format!("digraph {} {{\n", quote(&model.name));
    let items = forest(model);
    let mut edges = Vec::new();

    for (_, item) in &items {
        match item {
            ForestItem::Goal(g) => {
                let id = g.id.as_str();
                let mut label = id.to_string();
                for line in [g.summary(), g.object.clone()] {
                    if !line.is_empty() {
                        label.push('\n');
                        label.push_str(&line);
                    }
                }
                let _ = write!(label, "\n({})", plan_count(model, id));
                let _ = write!(out, "  {} [shape=box, label={}", quote(id), quote(&label));
                if let Some(status) = report.and_then(|r| r.status(id)) {
                    let _ = write!(out, ", style=filled, fillcolor={}", fill(status));
                }
                out.push_str("];\n");
            }
            ForestItem::Strategy(s) => {
                let id = s.id.as_str();
                let label = if s.decision.is_empty() {
                    id.to_string()
                } else {
                    format!("{id}\n{}", s.decision)
                };
                let _ = writeln!(out, "  {} [shape=ellipse, label={}];", quote(id), quote(&label));
                edges.push(format!("  {} -> {};\n", quote(s.parent_goal.as_str()), quote(id)));
                for g in model.goals_derived_from(id) {
                    edges.push(format!("  {} -> {};\n", quote(id), quote(g.id.as_str())));
                }
            }
        }
    }

    let goals: HashSet<&str> = model.goals().map(|g| g.id.as_str()).collect();
    let mut notes: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for r in model.all_relations() {
        if !goals.contains(r.from.as_str()) {
            continue;
        }
        let to = match &r.to {
            RelationTarget::Goal(g) if goals.contains(g.as_str()) => g.as_str().to_string(),
            RelationTarget::Goal(_) => continue,
            RelationTarget::Label(text) => {
                if !notes.contains(text) {
                    notes.push(text.clone());
                }
                format!("rel:{text}")
            }
        };
        if seen.insert((r.from.as_str().to_string(), r.kind, to.clone())) {
            edges.push(format!(
                "  {} -> {} [style=dashed, label={}];\n",
                quote(r.from.as_str()),
                quote(&to),
                quote(r.kind.keyword())
            ));
        }
    }
    for text in &notes {
        let _ = writeln!(
            out,
            "  {} [shape=plaintext, label={}];",
            quote(&format!("rel:{text}")),
            quote(text)
        );
    }
    for e in edges {
        out.push_str(&e);
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DotError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum DotTok {
    Id(String),
    Punct(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<(DotTok, usize)>, DotError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(c) = chars.next() {
        match c {
            '\n' => line += 1,
            c if c.is_whitespace() => {}
            '{' | '}' | '[' | ']' | '=' | ';' | ',' => {
                let p = match c {
                    '{' => "{",
                    '}' => "}",
                    '[' => "[",
                    ']' => "]",
                    '=' => "=",
                    ';' => ";",
                    _ => ",",
                };
                out.push((DotTok::Punct(p), line));
            }
            '-' if chars.peek() == Some(&'>') => {
                chars.next();
                out.push((DotTok::Punct("->"), line));
            }
            '"' => {
                let start = line;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => {
                            return Err(DotError {
                                line: start,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match chars.next() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some(other) => {
                                s.push('\\');
                                s.push(other);
                            }
                            None => {
                                return Err(DotError {
                                    line: start,
                                    message: "unterminated string".into(),
                                })
                            }
                        },
                        Some('\n') => {
                            line += 1;
                            s.push('\n');
                        }
                        Some(other) => s.push(other),
                    }
                }
                out.push((DotTok::Id(s), start));
            }
            c if c.is_ascii_alphanumeric() || c == '_' || c == '.' => {
                let mut s = c.to_string();
                while let Some(&n) = chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' || n == '.' {
                        s.push(n);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((DotTok::Id(s), line));
            }
            other => {
                return Err(DotError {
                    line,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

/// Checks that `text` is a well-formed digraph in the subset this crate
/// emits: node and edge statements only, attributes limited to `shape`,
/// `label`, `style` and `fillcolor`, and every edge endpoint declared as a node.
pub fn check_dot(text: &str) -> Result<(), DotError> {
    let tokens = tokenize(text)?;
    let last_line = text.lines().count().max(1);
    let mut pos = 0;
    let err = |line: usize, message: String| DotError { line, message };
    let line_at = |pos: usize| tokens.get(pos).map_or(last_line, |t| t.1);
    let punct = |pos: usize, p: &str| matches!(tokens.get(pos), Some((DotTok::Punct(q), _)) if *q == p);
    let id = |pos: usize| match tokens.get(pos) {
        Some((DotTok::Id(s), _)) => Some(s.clone()),
        _ => None,
    };

    if id(pos).as_deref() != Some("digraph") {
        return Err(err(line_at(pos), "expected `digraph`".into()));
    }
    pos += 1;
    if id(pos).is_some() {
        pos += 1;
    }
    if !punct(pos, "{") {
        return Err(err(line_at(pos), "expected `{`".into()));
    }
    pos += 1;

    let mut nodes = HashSet::new();
    let mut endpoints = Vec::new();
    loop {
        if punct(pos, "}") {
            pos += 1;
            break;
        }
        let Some(first) = id(pos) else {
            return Err(err(line_at(pos), "expected a statement or `}`".into()));
        };
        let line = line_at(pos);
        pos += 1;
        let mut chain = vec![first];
        while punct(pos, "->") {
            pos += 1;
            let Some(next) = id(pos) else {
                return Err(err(line_at(pos), "expected a node after `->`".into()));
            };
            chain.push(next);
            pos += 1;
        }
        if punct(pos, "[") {
            pos += 1;
            loop {
                if punct(pos, "]") {
                    pos += 1;
                    break;
                }
                let Some(name) = id(pos) else {
                    return Err(err(line_at(pos), "expected an attribute or `]`".into()));
                };
                if !ATTRIBUTES.contains(&name.as_str()) {
                    return Err(err(line_at(pos), format!("attribute `{name}` not allowed")));
                }
                if !punct(pos + 1, "=") || id(pos + 2).is_none() {
                    return Err(err(line_at(pos), format!("expected `{name}=value`")));
                }
                pos += 3;
                if punct(pos, ",") || punct(pos, ";") {
                    pos += 1;
                }
            }
        }
        if punct(pos, ";") {
            pos += 1;
        }
        if chain.len() == 1 {
            nodes.insert(chain.pop().unwrap());
        } else {
            endpoints.extend(chain.into_iter().map(|n| (n, line)));
        }
    }
    if pos != tokens.len() {
        return Err(err(line_at(pos), "text after the closing `}`".into()));
    }
    for (n, line) in endpoints {
        if !nodes.contains(&n) {
            return Err(err(line, format!("edge endpoint `{n}` is not a declared node")));
        }
    }
    Ok(())
}
