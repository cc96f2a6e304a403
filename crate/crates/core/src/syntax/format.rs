use std::fmt::Write;

use crate::model::{Decl, Goal, GqmPlan, Ident, MetricDecl, Model, RelationRef, RelationTarget, Strategy};
use crate::syntax::{quote, Quoted};

fn idents(ids: &[Ident]) -> String {
    let names: Vec<&str> = ids.iter().map(Ident::as_str).collect();
    format!("[{}]", names.join(", "))
}

fn strings(items: &[String]) -> String {
    let quoted: Vec<String> = items.iter().map(|s| quote(s)).collect();
    format!("[{}]", quoted.join(", "))
}

fn target(t: &RelationTarget) -> String {
    match t {
        RelationTarget::Goal(id) => id.to_string(),
        RelationTarget::Label(s) => quote(s),
    }
}

fn relation_ref(r: &RelationRef) -> String {
    match r {
        RelationRef::Typed { kind, to } => format!("{kind} {}", target(to)),
        RelationRef::Note(s) => quote(s),
    }
}

fn text_field(out: &mut String, indent: &str, key: &str, value: &str) {
    if !value.is_empty() {
        let _ = writeln!(out, "{indent}{key} {}", Quoted(value));
    }
}

fn goal(out: &mut String, g: &Goal) {
    let _ = writeln!(out, "goal {} {{", g.id);
    if let Some(level) = g.level {
        let _ = writeln!(out, "  level {level}");
    }
    if let Some(t) = g.goal_type {
        let _ = writeln!(out, "  type {t}");
    }
    if let Some(s) = &g.derived_from {
        let _ = writeln!(out, "  derived_from {s}");
    }
    for (key, value) in g.template_fields() {
        text_field(out, "  ", key, value);
    }
    let _ = writeln!(out, "  constraints {}", strings(&g.constraints));
    if !g.relations.is_empty() {
        let rels: Vec<String> = g.relations.iter().map(relation_ref).collect();
        let _ = writeln!(out, "  relations [{}]", rels.join(", "));
    }
    if !g.context_refs.is_empty() {
        let _ = writeln!(out, "  context {}", idents(&g.context_refs));
    }
    if !g.assumption_refs.is_empty() {
        let _ = writeln!(out, "  assumptions {}", idents(&g.assumption_refs));
    }
    out.push_str("}\n");
}

fn strategy(out: &mut String, s: &Strategy) {
    let _ = writeln!(out, "strategy {} for {} {{", s.id, s.parent_goal);
    text_field(out, "  ", "decision", &s.decision);
    if !s.activities.is_empty() {
        let _ = writeln!(out, "  activities {}", strings(&s.activities));
    }
    if !s.context_refs.is_empty() {
        let _ = writeln!(out, "  context {}", idents(&s.context_refs));
    }
    if !s.assumption_refs.is_empty() {
        let _ = writeln!(out, "  assumptions {}", idents(&s.assumption_refs));
    }
    out.push_str("}\n");
}

fn metric(out: &mut String, m: &MetricDecl) {
    let _ = write!(out, "metric {}: {}", m.id, m.value_kind);
    if let Some(unit) = &m.unit {
        let _ = write!(out, " unit {}", Quoted(unit));
    }
    if let Some(period) = &m.period_label {
        let _ = write!(out, " period {}", Quoted(period));
    }
    out.push('\n');
}

fn plan(out: &mut String, p: &GqmPlan) {
    let _ = write!(out, "gqm for {}", p.goal_ref);
    if let Some(s) = &p.strategy_ref {
        let _ = write!(out, " via {s}");
    }
    out.push_str(" {\n  mgoal {\n");
    for (key, value) in p.mgoal.fields() {
        text_field(out, "    ", key, value);
    }
    out.push_str("  }\n");
    for q in &p.questions {
        let _ = writeln!(out, "  question {} {}", q.id, Quoted(&q.text));
    }
    for m in &p.metric_refs {
        let _ = writeln!(out, "  metric {m}");
    }
    out.push_str("  interpretation {\n");
    let _ = writeln!(out, "    satisfied when {}", p.interpretation.satisfied_when);
    for rule in &p.interpretation.diagnostics {
        let _ = writeln!(out, "    diagnostic {} when {}", Quoted(&rule.message), rule.condition);
    }
    out.push_str("  }\n}\n");
}

fn one_line_kind(d: &Decl) -> Option<u8> {
    match d {
        Decl::Context(_) => Some(0),
        Decl::Assumption(_) => Some(1),
        Decl::Metric(_) => Some(2),
        Decl::Relation(_) => Some(3),
        _ => None,
    }
}

/// Canonical text for `model`: declarations in their original order, goal
/// fields in template order, two-space indentation. Runs of one-line
/// declarations of the same kind stay together; everything else is separated
/// by a blank line. Comments are not preserved.
pub fn format_model(model: &Model) -> String {
    let mut out = String::new();
    let mut prev: Option<&Decl> = None;
    for decl in &model.decls {
        if let Some(p) = prev {
            let grouped = one_line_kind(p).is_some() && one_line_kind(p) == one_line_kind(decl);
            if !grouped {
                out.push('\n');
            }
        }
        match decl {
            Decl::Goal(g) => goal(&mut out, g),
            Decl::Strategy(s) => strategy(&mut out, s),
            Decl::Context(c) => {
                let _ = writeln!(out, "context {} {}", c.id, Quoted(&c.statement));
            }
            Decl::Assumption(a) => {
                let _ = writeln!(out, "assumption {} {}", a.id, Quoted(&a.statement));
            }
            Decl::Metric(m) => metric(&mut out, m),
            Decl::Plan(p) => plan(&mut out, p),
            Decl::Relation(r) => {
                let _ = writeln!(out, "relation {} {} {}", r.from, r.kind, target(&r.to));
            }
        }
        prev = Some(decl);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_model;

    #[test]
    fn shuffled_goal_fields_come_out_in_template_order() {
        let shuffled = r#"goal G1 { scope "s" focus "f" level 2 derived_from S magnitude "m" activity "a" object "o" timeframe "t" constraints ["c"] }"#;
        let expected = "goal G1 {\n  level 2\n  derived_from S\n  activity \"a\"\n  focus \"f\"\n  object \"o\"\n  magnitude \"m\"\n  timeframe \"t\"\n  scope \"s\"\n  constraints [\"c\"]\n}\n";
        let model = parse_model(shuffled, "x.gqms").unwrap();
        assert_eq!(format_model(&model), expected);
        let reparsed = parse_model(&format_model(&model), "x.gqms").unwrap();
        assert!(reparsed.structurally_eq(&model));
    }

    #[test]
    fn empty_constraints_are_explicit() {
        let model = parse_model("goal G { level 1 }", "x.gqms").unwrap();
        assert_eq!(format_model(&model), "goal G {\n  level 1\n  constraints []\n}\n");
    }

    #[test]
    fn empty_model_formats_to_nothing() {
        assert_eq!(format_model(&Model::default()), "");
    }

    #[test]
    fn one_liners_group() {
        let text =
            "metric a: number metric b: boolean unit \"x\" context C \"c\" context D \"d\" relation G competing H";
        let model = parse_model(text, "x.gqms").unwrap();
        assert_eq!(
            format_model(&model),
            "metric a: number\nmetric b: boolean unit \"x\"\n\ncontext C \"c\"\ncontext D \"d\"\n\nrelation G competing H\n"
        );
    }

    #[test]
    fn escapes_survive() {
        let model = parse_model(r#"context C "say \"hi\" \\ bye""#, "x.gqms").unwrap();
        let text = format_model(&model);
        assert_eq!(text, "context C \"say \\\"hi\\\" \\\\ bye\"\n");
        assert!(parse_model(&text, "x.gqms").unwrap().structurally_eq(&model));
    }
}
