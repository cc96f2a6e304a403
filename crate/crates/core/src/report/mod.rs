//! Human-facing renderings of models and evaluation reports.

mod dot;
mod markdown;
mod tree;

use std::fmt;
use std::str::FromStr;

use crate::eval::EvaluationReport;
use crate::model::{Goal, Model};

pub use dot::{check_dot, render_dot, DotError};
pub use markdown::{render_model_md, render_report_md};
pub use tree::render_tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Tree,
    Dot,
    Md,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Tree, Format::Dot, Format::Md];

    pub fn name(self) -> &'static str {
        match self {
            Format::Tree => "tree",
            Format::Dot => "dot",
            Format::Md => "md",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Format::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown format `{s}` (expected tree, dot or md)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RenderOptions {
    pub format: Format,
    /// Show goal statuses when a report is given.
    pub show_statuses: bool,
    /// ANSI colors in tree output.
    pub color: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: Format::Tree,
            show_statuses: true,
            color: false,
        }
    }
}

impl RenderOptions {
    pub fn new(format: Format) -> Self {
        RenderOptions {
            format,
            ..RenderOptions::default()
        }
    }
}

/// Renders `model` (and `report`, if any) in the chosen format.
pub fn render(model: &Model, report: Option<&EvaluationReport>, options: &RenderOptions) -> String {
    let report = report.filter(|_| options.show_statuses);
    match options.format {
        Format::Tree => tree::render(model, report, options.color),
        Format::Dot => render_dot(model, report),
        Format::Md => match report {
            Some(r) => render_report_md(model, r),
            None => render_model_md(model),
        },
    }
}

/// Goals in forest order: each root (in declaration order) followed by its
/// subtree. Goals stuck on a derivation cycle come last.
pub(crate) fn forest<'m>(model: &'m Model) -> Vec<(usize, ForestItem<'m>)> {
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let roots: Vec<&Goal> = model
        .goals()
        .filter(|g| crate::model::order::parent_goal(model, g).is_none())
        .collect();
    for g in roots {
        walk(model, g, 0, &mut seen, &mut out);
    }
    let rest: Vec<&Goal> = model.goals().filter(|g| !seen.contains(g.id.as_str())).collect();
    for g in rest {
        walk(model, g, 0, &mut seen, &mut out);
    }
    out
}

pub(crate) enum ForestItem<'m> {
    Goal(&'m Goal),
    Strategy(&'m crate::model::Strategy),
}

fn walk<'m>(
    model: &'m Model,
    goal: &'m Goal,
    depth: usize,
    seen: &mut std::collections::HashSet<&'m str>,
    out: &mut Vec<(usize, ForestItem<'m>)>,
) {
    if !seen.insert(goal.id.as_str()) {
        return;
    }
    out.push((depth, ForestItem::Goal(goal)));
    for s in model.strategies().filter(|s| s.parent_goal == goal.id) {
        out.push((depth + 1, ForestItem::Strategy(s)));
        for child in model.goals_derived_from(s.id.as_str()) {
            walk(model, child, depth + 2, seen, out);
        }
    }
}

pub(crate) fn plan_count(model: &Model, goal: &str) -> String {
    match model.plans_for(goal).count() {
        0 => "no plan".to_string(),
        1 => "1 plan".to_string(),
        n => format!("{n} plans"),
    }
}
