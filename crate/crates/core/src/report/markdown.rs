use std::fmt::Write;

use crate::eval::{explain, EvaluationReport, InputUse};
use crate::expr::GoalStatus;
use crate::model::{GqmPlan, Model};

fn cell(text: &str) -> String {
    text.replace('|', "\\|").replace('\n', " ")
}

fn input_text(i: &InputUse) -> String {
    match i.value {
        Some(v) => format!("{}[{}]={}", i.metric, i.period, v),
        None => format!("{}[{}]=missing", i.metric, i.period),
    }
}

fn blank_line(out: &mut String) {
    while !out.ends_with("\n\n") {
        out.push('\n');
    }
}

fn level(l: Option<u32>) -> String {
    l.map_or_else(|| "?".to_string(), |l| l.to_string())
}

fn plan_details(out: &mut String, plan: &GqmPlan) {
    let _ = writeln!(out, "Plan `{}`:\n", plan.label());
    for (name, value) in plan.mgoal.fields() {
        if !value.is_empty() {
            let _ = writeln!(out, "- {name}: {value}");
        }
    }
    for q in &plan.questions {
        let _ = writeln!(out, "- question {}: {}", q.id, q.text);
    }
    if !plan.metric_refs.is_empty() {
        let metrics: Vec<&str> = plan.metric_refs.iter().map(|m| m.as_str()).collect();
        let _ = writeln!(out, "- metrics: {}", metrics.join(", "));
    }
    let _ = writeln!(out, "- satisfied when: `{}`", plan.interpretation.satisfied_when);
    for rule in &plan.interpretation.diagnostics {
        let _ = writeln!(out, "- diagnostic \"{}\" when `{}`", rule.message, rule.condition);
    }
    out.push('\n');
}

/// Markdown report: status table, findings, conflicts and one section per goal.
pub fn render_report_md(model: &Model, report: &EvaluationReport) -> String {
    let mut out = format!("# {} at period {}\n\n", model.name, report.period);
    out.push_str("| Goal | Level | Status | Key inputs |\n|---|---|---|---|\n");
    for g in &report.goals {
        let inputs = if g.has_plan() {
            g.inputs.iter().map(input_text).collect::<Vec<_>>().join(", ")
        } else {
            "no plan".to_string()
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            g.goal,
            level(g.level),
            g.status,
            cell(&inputs)
        );
    }
    if !report.goals.is_empty() && report.goals.iter().all(|g| g.status == GoalStatus::Undetermined) {
        out.push_str("\nNo goal could be decided: the data for this period is missing or incomplete.\n");
    }

    out.push_str("\n## Findings\n\n");
    if report.findings.is_empty() {
        out.push_str("None.\n");
    }
    for f in &report.findings {
        let _ = writeln!(out, "- {}: \"{}\"", f.goal, f.message);
    }

    out.push_str("\n## Conflicts\n\n");
    if report.conflicts.is_empty() {
        out.push_str("None.\n");
    }
    for c in &report.conflicts {
        let _ = writeln!(out, "- {} {}: {}", c.code, c.location, c.message);
    }

    out.push_str("\n## Goal details\n");
    for g in &report.goals {
        let Some(goal) = model.goal(&g.goal) else { continue };
        blank_line(&mut out);
        let _ = write!(out, "### {}", g.goal);
        let summary = goal.summary();
        if !summary.is_empty() {
            let _ = write!(out, ": {summary}");
        }
        let _ = writeln!(out, "\n\nStatus: {}\n", g.status);
        let explanation = explain(report, &g.goal).expect("goal is in the report");
        if explanation.plans.is_empty() {
            out.push_str("No plan defined (see W_NO_PLAN).\n\n");
        }
        for p in &explanation.plans {
            let _ = writeln!(out, "- `{}`: `{}`", p.plan, p.annotated);
        }
        if !explanation.plans.is_empty() {
            out.push('\n');
        }
        for plan in model.plans_for(&g.goal) {
            plan_details(&mut out, plan);
        }
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}

/// Markdown description of a model without measurement data.
pub fn render_model_md(model: &Model) -> String {
    let mut out = format!("# {}\n\n", model.name);
    out.push_str("| Goal | Level | Summary | Plans |\n|---|---|---|---|\n");
    for g in model.goals() {
        let plans = model.plans_for(g.id.as_str()).count();
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} |",
            g.id,
            level(g.level),
            cell(&g.summary()),
            plans
        );
    }
    out.push_str("\n## Goal details\n");
    for g in model.goals() {
        blank_line(&mut out);
        let _ = writeln!(out, "### {}\n", g.id);
        if let Some(t) = g.goal_type {
            let _ = writeln!(out, "- type: {}", t.keyword());
        }
        for (name, value) in g.template_fields() {
            if !value.is_empty() {
                let _ = writeln!(out, "- {name}: {value}");
            }
        }
        if !g.constraints.is_empty() {
            let _ = writeln!(out, "- constraints: {}", g.constraints.join("; "));
        }
        for s in model.strategies().filter(|s| s.parent_goal == g.id) {
            let _ = writeln!(out, "- strategy {}: {}", s.id, s.decision);
        }
        out.push('\n');
        for plan in model.plans_for(g.id.as_str()) {
            plan_details(&mut out, plan);
        }
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    out
}
