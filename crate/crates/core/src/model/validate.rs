use std::collections::{HashMap, HashSet};

use crate::diagnostic::{codes, Diagnostic, Severity};
use crate::expr::{typecheck_condition, Expr, TypeErrorKind};
use crate::model::order::{descendants, find_cycles, parent_goal};
use crate::model::{Decl, Ident, Model, RelationTarget};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Goal,
    Strategy,
    Context,
    Assumption,
    Metric,
}

impl Kind {
    fn noun(self) -> &'static str {
        match self {
            Kind::Goal => "goal",
            Kind::Strategy => "strategy",
            Kind::Context => "context factor",
            Kind::Assumption => "assumption",
            Kind::Metric => "metric",
        }
    }
}

struct Validator<'m> {
    model: &'m Model,
    strict: bool,
    /// First declaration of every identifier.
    names: HashMap<&'m str, (Kind, &'m SourceSpan)>,
    out: Vec<Diagnostic>,
}

impl<'m> Validator<'m> {
    fn error(&mut self, code: &'static str, at: &SourceSpan, message: String) {
        self.out.push(Diagnostic::error(code, at, message));
    }

    fn warning(&mut self, code: &'static str, at: &SourceSpan, message: String) {
        self.out.push(Diagnostic::warning(code, at, message));
    }

    fn declare(&mut self, id: &'m Ident, kind: Kind, decl: &'m SourceSpan) {
        let Some(&(prev_kind, prev_at)) = self.names.get(id.as_str()) else {
            self.names.insert(id.as_str(), (kind, decl));
            return;
        };
        if kind == Kind::Metric && prev_kind == Kind::Metric {
            return; // compared field by field in `metric_redeclarations`
        }
        self.error(
            codes::DUPLICATE_ID,
            at(id, decl),
            format!(
                "`{id}` is already declared as a {} at {}:{}",
                prev_kind.noun(),
                prev_at.start_line,
                prev_at.start_col
            ),
        );
    }

    fn identifiers(&mut self) {
        let model = self.model;
        for decl in &model.decls {
            match decl {
                Decl::Goal(g) => self.declare(&g.id, Kind::Goal, &g.span),
                Decl::Strategy(s) => self.declare(&s.id, Kind::Strategy, &s.span),
                Decl::Context(c) => self.declare(&c.id, Kind::Context, &c.span),
                Decl::Assumption(a) => self.declare(&a.id, Kind::Assumption, &a.span),
                Decl::Metric(m) => self.declare(&m.id, Kind::Metric, &m.span),
                Decl::Plan(p) => {
                    let mut seen = HashSet::new();
                    for q in &p.questions {
                        if !seen.insert(q.id.as_str()) {
                            self.error(
                                codes::DUPLICATE_ID,
                                at(&q.id, &p.span),
                                format!("question `{}` appears twice in the plan for {}", q.id, p.label()),
                            );
                        }
                    }
                }
                Decl::Relation(_) => {}
            }
        }
    }

    fn metric_redeclarations(&mut self) {
        let mut first = HashMap::new();
        for m in self.model.metrics() {
            let Some(prev) = first.get(m.id.as_str()).copied() else {
                first.insert(m.id.as_str(), m);
                continue;
            };
            let prev: &crate::model::MetricDecl = prev;
            let same = prev.value_kind == m.value_kind && prev.unit == m.unit && prev.period_label == m.period_label;
            let where_ = format!("{}:{}", prev.span.start_line, prev.span.start_col);
            if same {
                self.warning(
                    codes::DUPLICATE_METRIC,
                    &m.span,
                    format!("metric `{}` is declared again identically (first at {where_})", m.id),
                );
            } else {
                self.error(
                    codes::METRIC_CONFLICT,
                    &m.span,
                    format!(
                        "metric `{}` is redeclared differently from its declaration at {where_}",
                        m.id
                    ),
                );
            }
        }
    }

    fn completeness(&mut self) {
        let model = self.model;
        let missing = |what: &str, field: &str| format!("{what} is missing `{field}`");
        for decl in &model.decls {
            match decl {
                Decl::Goal(g) => {
                    let what = format!("goal {}", g.id);
                    if g.level.is_none() {
                        self.error(codes::MISSING_FIELD, &g.span, missing(&what, "level"));
                    }
                    for (field, value) in g.template_fields() {
                        if value.trim().is_empty() {
                            self.error(codes::MISSING_FIELD, &g.span, missing(&what, field));
                        }
                    }
                    if g.level == Some(1) && g.goal_type.is_none() {
                        self.error(
                            codes::MISSING_TYPE,
                            &g.span,
                            format!(
                                "level-1 goal {} needs a `type` (growth, success, maintenance, specific_focus)",
                                g.id
                            ),
                        );
                    }
                }
                Decl::Strategy(s) if s.decision.trim().is_empty() => {
                    self.error(
                        codes::MISSING_FIELD,
                        &s.span,
                        missing(&format!("strategy {}", s.id), "decision"),
                    );
                }
                Decl::Context(c) if c.statement.trim().is_empty() => {
                    self.error(
                        codes::MISSING_FIELD,
                        &c.span,
                        missing(&format!("context {}", c.id), "statement"),
                    );
                }
                Decl::Assumption(a) if a.statement.trim().is_empty() => {
                    self.error(
                        codes::MISSING_FIELD,
                        &a.span,
                        missing(&format!("assumption {}", a.id), "statement"),
                    );
                }
                Decl::Plan(p) => {
                    for (field, value) in p.mgoal.fields() {
                        if value.trim().is_empty() {
                            self.error(
                                codes::MISSING_FIELD,
                                &p.span,
                                missing(&format!("measurement goal of plan {}", p.label()), field),
                            );
                        }
                    }
                }
                _ => {}
            }
        }
    }

    /// Reports `id` unless it names an element of kind `want`.
    fn resolve(&mut self, id: &Ident, want: Kind, owner: &SourceSpan) -> bool {
        match self.names.get(id.as_str()) {
            Some((kind, _)) if *kind == want => true,
            Some((kind, _)) => {
                let msg = format!("`{id}` is a {}, expected a {}", kind.noun(), want.noun());
                self.error(codes::DANGLING_REF, at(id, owner), msg);
                false
            }
            None => {
                let msg = format!("unknown {} `{id}`", want.noun());
                self.error(codes::DANGLING_REF, at(id, owner), msg);
                false
            }
        }
    }

    fn references(&mut self) {
        let model = self.model;
        for decl in &model.decls {
            match decl {
                Decl::Goal(g) => {
                    if let Some(s) = &g.derived_from {
                        self.resolve(s, Kind::Strategy, &g.span);
                    }
                    for c in &g.context_refs {
                        self.resolve(c, Kind::Context, &g.span);
                    }
                    for a in &g.assumption_refs {
                        self.resolve(a, Kind::Assumption, &g.span);
                    }
                }
                Decl::Strategy(s) => {
                    self.resolve(&s.parent_goal, Kind::Goal, &s.span);
                    for c in &s.context_refs {
                        self.resolve(c, Kind::Context, &s.span);
                    }
                    for a in &s.assumption_refs {
                        self.resolve(a, Kind::Assumption, &s.span);
                    }
                }
                Decl::Plan(p) => {
                    self.resolve(&p.goal_ref, Kind::Goal, &p.span);
                    if let Some(s) = &p.strategy_ref {
                        self.resolve(s, Kind::Strategy, &p.span);
                    }
                    for m in &p.metric_refs {
                        self.resolve(m, Kind::Metric, &p.span);
                    }
                }
                _ => {}
            }
        }
        for rel in model.all_relations() {
            self.resolve(&rel.from, Kind::Goal, &rel.span);
            if let RelationTarget::Goal(to) = &rel.to {
                self.resolve(to, Kind::Goal, &rel.span);
            }
        }
    }

    fn structure(&mut self) {
        let model = self.model;
        let mut on_cycle = HashSet::new();
        for cycle in find_cycles(model) {
            let first = model.goal(&cycle[0]).expect("cycle members are declared goals");
            let mut path = cycle.clone();
            path.push(cycle[0].clone());
            self.error(
                codes::CYCLE,
                &first.span,
                format!("goals derive from each other in a cycle: {}", path.join(" -> ")),
            );
            on_cycle.extend(cycle);
        }
        for g in model.goals() {
            if on_cycle.contains(&g.id.name) {
                continue;
            }
            let Some(level) = g.level else { continue };
            match &g.derived_from {
                None if level != 1 => self.error(
                    codes::LEVEL,
                    &g.span,
                    format!(
                        "goal {} is not derived from any strategy, so its level must be 1 (found {level})",
                        g.id
                    ),
                ),
                None => {}
                Some(s) => {
                    if level == 1 {
                        self.error(
                            codes::LEVEL,
                            &g.span,
                            format!("goal {} derives from strategy {s}, so it cannot be at level 1", g.id),
                        );
                    } else if let Some(parent) = parent_goal(model, g) {
                        if let Some(parent_level) = parent.level {
                            if level != parent_level + 1 {
                                self.error(
                                    codes::LEVEL,
                                    &g.span,
                                    format!(
                                        "goal {} derives from {} at level {parent_level}, so its level must be {} (found {level})",
                                        g.id,
                                        parent.id,
                                        parent_level + 1
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    fn condition(&mut self, expr: &Expr) {
        let Err(errors) = typecheck_condition(expr, self.model) else {
            return;
        };
        for e in errors {
            let code = match e.kind {
                TypeErrorKind::Mismatch { .. } => codes::TYPE,
                TypeErrorKind::UnknownMetric(_) | TypeErrorKind::UnknownGoal(_) => codes::DANGLING_REF,
            };
            self.error(code, &e.span, e.to_string());
        }
    }

    fn plans(&mut self) {
        let model = self.model;
        let mut seen: HashMap<(&str, Option<&str>), &SourceSpan> = HashMap::new();
        for p in model.plans() {
            let key = (p.goal_ref.as_str(), p.strategy_ref.as_ref().map(Ident::as_str));
            if let Some(prev) = seen.get(&key) {
                let msg = format!(
                    "a plan for {} already exists at {}:{}",
                    p.label(),
                    prev.start_line,
                    prev.start_col
                );
                self.error(codes::DUPLICATE_PLAN, &p.span, msg);
            } else {
                seen.insert(key, &p.span);
            }

            if let Some(s) = p.strategy_ref.as_ref().and_then(|s| model.strategy(s.as_str())) {
                if s.parent_goal != p.goal_ref && model.goal(p.goal_ref.as_str()).is_some() {
                    let msg = format!(
                        "plan for {} names strategy {} which belongs to goal {}",
                        p.goal_ref, s.id, s.parent_goal
                    );
                    self.error(codes::PLAN_MISMATCH, at(p.strategy_ref.as_ref().unwrap(), &p.span), msg);
                }
            }

            self.condition(&p.interpretation.satisfied_when);
            for rule in &p.interpretation.diagnostics {
                self.condition(&rule.condition);
            }

            if model.goal(p.goal_ref.as_str()).is_some() {
                let below: HashSet<String> = descendants(model, p.goal_ref.as_str()).into_iter().collect();
                for (goal, span) in p.interpretation.satisfied_when.status_refs() {
                    if model.goal(goal).is_some() && !below.contains(goal) {
                        let msg = format!(
                            "`satisfied when` of {} reads status({goal}), but {goal} is not derived from {}; \
                             use a diagnostic rule to look at other goals",
                            p.label(),
                            p.goal_ref
                        );
                        self.error(codes::STATUS_SCOPE, span, msg);
                    }
                }
            }
        }
    }

    fn coverage(&mut self) {
        let model = self.model;
        let severity = if self.strict {
            Severity::Error
        } else {
            Severity::Warning
        };
        let push = |out: &mut Vec<Diagnostic>, at: &SourceSpan, message: String| {
            out.push(Diagnostic {
                severity,
                code: codes::NO_PLAN,
                message,
                location: at.clone(),
            });
        };
        for g in model.goals() {
            let strategies: Vec<_> = model.strategies_of(g.id.as_str()).collect();
            let plans: Vec<_> = model.plans_for(g.id.as_str()).collect();
            if strategies.is_empty() {
                if plans.is_empty() {
                    push(&mut self.out, &g.span, format!("goal {} has no measurement plan", g.id));
                }
                continue;
            }
            for s in strategies {
                let covered = plans
                    .iter()
                    .any(|p| p.strategy_ref.as_ref().is_some_and(|r| r.name == s.id.name));
                if !covered {
                    push(
                        &mut self.out,
                        &s.span,
                        format!("goal {} with strategy {} has no measurement plan", g.id, s.id),
                    );
                }
            }
        }
        if self.strict && model.goals().next().is_none() {
            self.warning(
                codes::EMPTY,
                &SourceSpan::default(),
                "model declares no goals".to_string(),
            );
        }
    }
}

/// The identifier's own span when it has one, else its owner's.
fn at<'a>(id: &'a Ident, owner: &'a SourceSpan) -> &'a SourceSpan {
    if id.span.is_empty() {
        owner
    } else {
        &id.span
    }
}

/// Checks `model` against the meta-model and returns every violation,
/// ordered by source position. An empty result means the model is well formed.
///
/// With `strict`, goals or goal/strategy pairs lacking a measurement plan are
/// errors instead of warnings, and an empty model draws `W_EMPTY`.
pub fn validate(model: &Model, strict: bool) -> Vec<Diagnostic> {
    let mut v = Validator {
        model,
        strict,
        names: HashMap::new(),
        out: Vec::new(),
    };
    v.identifiers();
    v.metric_redeclarations();
    v.completeness();
    v.references();
    v.structure();
    v.plans();
    v.coverage();
    let mut out = v.out;
    out.sort_by(|a, b| {
        let key = |d: &Diagnostic| (d.location.start_line, d.location.start_col);
        key(a).cmp(&key(b))
    });
    out
}
