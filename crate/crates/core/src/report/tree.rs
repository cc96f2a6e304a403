use crate::eval::EvaluationReport;
use crate::expr::GoalStatus;
use crate::model::Model;
use crate::report::{forest, plan_count, ForestItem};

/// Indented goal/strategy forest, one element per line. With a report, each
/// goal line carries its status glyph.
pub fn render_tree(model: &Model, report: Option<&EvaluationReport>) -> String {
    render(model, report, false)
}

pub(crate) fn render(model: &Model, report: Option<&EvaluationReport>, color: bool) -> String {
    let mut out = String::new();
    for (depth, item) in forest(model) {
        out.push_str(&"  ".repeat(depth));
        match item {
            ForestItem::Goal(g) => {
                out.push_str(g.id.as_str());
                if let Some(status) = report.and_then(|r| r.status(g.id.as_str())) {
                    out.push(' ');
                    out.push_str(&glyph(status, color));
                }
                match g.level {
                    Some(l) => out.push_str(&format!(" [level {l}]")),
                    None => out.push_str(" [level ?]"),
                }
                let summary = g.summary();
                if !summary.is_empty() {
                    out.push(' ');
                    out.push_str(&summary);
                }
                out.push_str(&format!(" ({})", plan_count(model, g.id.as_str())));
            }
            ForestItem::Strategy(s) => {
                out.push_str(s.id.as_str());
                if !s.decision.is_empty() {
                    out.push_str(": ");
                    out.push_str(&s.decision);
                }
            }
        }
        out.push('\n');
    }
    out
}

fn glyph(status: GoalStatus, color: bool) -> String {
    if !color {
        return status.glyph().to_string();
    }
    let code = match status {
        GoalStatus::Satisfied => 32,
        GoalStatus::NotSatisfied => 31,
        GoalStatus::Undetermined => 33,
    };
    format!("\x1b[{code}m{}\x1b[0m", status.glyph())
}
