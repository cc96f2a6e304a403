//! Domain types of the goal/strategy measurement meta-model.
//!
//! A [`Model`] is a flat list of declarations in source order. Goals are
//! refined by strategies, and strategies lead to lower-level goals through the
//! goal's `derived_from` link, so the derivation structure is a forest rooted
//! at level-1 business goals. Context factors and assumptions annotate goals
//! and strategies; measurement plans attach an interpretation model to a goal
//! (optionally for one of its strategies).

mod conflicts;
pub(crate) mod order;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::expr::Expr;
use crate::span::SourceSpan;

pub use conflicts::detect_conflicts;
pub use order::{derivation_order, descendants, CycleError};
pub use validate::validate;

/// An identifier as written in the source, with the span of that occurrence.
/// Equality and hashing look at the name only.
#[derive(Debug, Clone, Serialize)]
pub struct Ident {
    pub name: String,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: SourceSpan::default(),
        }
    }

    pub fn with_span(name: impl Into<String>, span: SourceSpan) -> Self {
        Ident {
            name: name.into(),
            span,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Ident {}

impl std::hash::Hash for Ident {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.name.hash(state);
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GoalType {
    Growth,
    Success,
    Maintenance,
    SpecificFocus,
}

impl GoalType {
    pub const ALL: [GoalType; 4] = [
        GoalType::Growth,
        GoalType::Success,
        GoalType::Maintenance,
        GoalType::SpecificFocus,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            GoalType::Growth => "growth",
            GoalType::Success => "success",
            GoalType::Maintenance => "maintenance",
            GoalType::SpecificFocus => "specific_focus",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GoalType> {
        GoalType::ALL.into_iter().find(|t| t.keyword() == word)
    }
}

impl fmt::Display for GoalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    Complementary,
    Competing,
}

impl RelationKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RelationKind::Complementary => "complementary",
            RelationKind::Competing => "competing",
        }
    }

    pub fn from_keyword(word: &str) -> Option<RelationKind> {
        match word {
            "complementary" => Some(RelationKind::Complementary),
            "competing" => Some(RelationKind::Competing),
            _ => None,
        }
    }
}

impl fmt::Display for RelationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// The far end of a relation: another goal, or a goal described only in prose.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationTarget {
    Goal(Ident),
    Label(String),
}

impl fmt::Display for RelationTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationTarget::Goal(id) => write!(f, "{id}"),
            RelationTarget::Label(text) => write!(f, "\"{text}\""),
        }
    }
}

/// Entry of a goal's `relations` field.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationRef {
    Typed {
        kind: RelationKind,
        to: RelationTarget,
    },
    /// Untyped prose ("tradeoffs with ...", "ordering ..."); carries no semantics.
    Note(String),
}

/// A relation edge between goals, either declared at top level or lifted
/// from a goal's `relations` field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Relation {
    pub kind: RelationKind,
    pub from: Ident,
    pub to: RelationTarget,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Goal {
    pub id: Ident,
    pub level: Option<u32>,
    pub goal_type: Option<GoalType>,
    pub activity: String,
    pub focus: String,
    pub object: String,
    pub magnitude: String,
    pub timeframe: String,
    pub scope: String,
    pub constraints: Vec<String>,
    pub relations: Vec<RelationRef>,
    pub derived_from: Option<Ident>,
    pub context_refs: Vec<Ident>,
    pub assumption_refs: Vec<Ident>,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl Goal {
    pub fn new(id: impl Into<String>) -> Self {
        Goal {
            id: Ident::new(id),
            level: None,
            goal_type: None,
            activity: String::new(),
            focus: String::new(),
            object: String::new(),
            magnitude: String::new(),
            timeframe: String::new(),
            scope: String::new(),
            constraints: Vec::new(),
            relations: Vec::new(),
            derived_from: None,
            context_refs: Vec::new(),
            assumption_refs: Vec::new(),
            span: SourceSpan::default(),
        }
    }

    /// The six template fields that must be non-empty, in template order.
    pub fn template_fields(&self) -> [(&'static str, &str); 6] {
        [
            ("activity", &self.activity),
            ("focus", &self.focus),
            ("object", &self.object),
            ("magnitude", &self.magnitude),
            ("timeframe", &self.timeframe),
            ("scope", &self.scope),
        ]
    }

    /// Short human summary, e.g. "Increase Profit".
    pub fn summary(&self) -> String {
        match (self.activity.is_empty(), self.focus.is_empty()) {
            (false, false) => format!("{} {}", self.activity, self.focus),
            (false, true) => self.activity.clone(),
            (true, false) => self.focus.clone(),
            (true, true) => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Strategy {
    pub id: Ident,
    pub parent_goal: Ident,
    pub decision: String,
    pub activities: Vec<String>,
    pub context_refs: Vec<Ident>,
    pub assumption_refs: Vec<Ident>,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContextFactor {
    pub id: Ident,
    pub statement: String,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assumption {
    pub id: Ident,
    pub statement: String,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Number,
    Boolean,
}

impl MetricKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MetricKind::Number => "number",
            MetricKind::Boolean => "boolean",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricDecl {
    pub id: Ident,
    pub value_kind: MetricKind,
    pub unit: Option<String>,
    /// What one period index means for this metric ("year", "release", ...).
    pub period_label: Option<String>,
    #[serde(skip)]
    pub span: SourceSpan,
}

/// The measurement-goal 5-tuple.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MGoal {
    pub object: String,
    pub purpose: String,
    pub focus: String,
    pub viewpoint: String,
    pub context: String,
}

impl MGoal {
    pub fn fields(&self) -> [(&'static str, &str); 5] {
        [
            ("object", &self.object),
            ("purpose", &self.purpose),
            ("focus", &self.focus),
            ("viewpoint", &self.viewpoint),
            ("context", &self.context),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Question {
    pub id: Ident,
    pub text: String,
}

/// Diagnostic rule of an interpretation model. Its condition may read any
/// goal's status but never influences one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticRule {
    pub message: String,
    pub condition: Expr,
    #[serde(skip)]
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpretationModel {
    pub satisfied_when: Expr,
    pub diagnostics: Vec<DiagnosticRule>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GqmPlan {
    pub goal_ref: Ident,
    pub strategy_ref: Option<Ident>,
    pub mgoal: MGoal,
    pub questions: Vec<Question>,
    pub metric_refs: Vec<Ident>,
    pub interpretation: InterpretationModel,
    #[serde(skip)]
    pub span: SourceSpan,
}

impl GqmPlan {
    /// "G1" or "G1 via S1".
    pub fn label(&self) -> String {
        match &self.strategy_ref {
            Some(s) => format!("{} via {}", self.goal_ref, s),
            None => self.goal_ref.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "decl", rename_all = "lowercase")]
pub enum Decl {
    Goal(Goal),
    Strategy(Strategy),
    Context(ContextFactor),
    Assumption(Assumption),
    Metric(MetricDecl),
    Plan(GqmPlan),
    Relation(Relation),
}

impl Decl {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Decl::Goal(d) => &d.span,
            Decl::Strategy(d) => &d.span,
            Decl::Context(d) => &d.span,
            Decl::Assumption(d) => &d.span,
            Decl::Metric(d) => &d.span,
            Decl::Plan(d) => &d.span,
            Decl::Relation(d) => &d.span,
        }
    }
}

/// A whole model: declarations in source order.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Model {
    pub name: String,
    pub decls: Vec<Decl>,
}

macro_rules! decl_iter {
    ($fn_name:ident, $variant:ident, $ty:ty) => {
        pub fn $fn_name(&self) -> impl Iterator<Item = &$ty> + '_ {
            self.decls.iter().filter_map(|d| match d {
                Decl::$variant(x) => Some(x),
                _ => None,
            })
        }
    };
}

impl Model {
    pub fn new(name: impl Into<String>) -> Self {
        Model {
            name: name.into(),
            decls: Vec::new(),
        }
    }

    decl_iter!(goals, Goal, Goal);
    decl_iter!(strategies, Strategy, Strategy);
    decl_iter!(contexts, Context, ContextFactor);
    decl_iter!(assumptions, Assumption, Assumption);
    decl_iter!(metrics, Metric, MetricDecl);
    decl_iter!(plans, Plan, GqmPlan);
    decl_iter!(relations, Relation, Relation);

    pub fn push(&mut self, decl: Decl) -> &mut Self {
        self.decls.push(decl);
        self
    }

    pub fn goal(&self, id: &str) -> Option<&Goal> {
        self.goals().find(|g| g.id.name == id)
    }

    pub fn strategy(&self, id: &str) -> Option<&Strategy> {
        self.strategies().find(|s| s.id.name == id)
    }

    /// First declaration of metric `id`.
    pub fn metric(&self, id: &str) -> Option<&MetricDecl> {
        self.metrics().find(|m| m.id.name == id)
    }

    pub fn strategies_of<'a>(&'a self, goal: &'a str) -> impl Iterator<Item = &'a Strategy> + 'a {
        self.strategies().filter(move |s| s.parent_goal.name == goal)
    }

    /// Goals derived from `strategy`, in declaration order.
    pub fn goals_derived_from<'a>(&'a self, strategy: &'a str) -> impl Iterator<Item = &'a Goal> + 'a {
        self.goals()
            .filter(move |g| g.derived_from.as_ref().is_some_and(|s| s.name == strategy))
    }

    pub fn plans_for<'a>(&'a self, goal: &'a str) -> impl Iterator<Item = &'a GqmPlan> + 'a {
        self.plans().filter(move |p| p.goal_ref.name == goal)
    }

    /// Top-level relation declarations followed by typed entries of goals'
    /// `relations` fields, in declaration order.
    pub fn all_relations(&self) -> Vec<Relation> {
        let mut out = Vec::new();
        for decl in &self.decls {
            match decl {
                Decl::Relation(r) => out.push(r.clone()),
                Decl::Goal(g) => {
                    for rel in &g.relations {
                        if let RelationRef::Typed { kind, to } = rel {
                            out.push(Relation {
                                kind: *kind,
                                from: g.id.clone(),
                                to: to.clone(),
                                span: g.span.clone(),
                            });
                        }
                    }
                }
                _ => {}
            }
        }
        out
    }

    /// Metric declarations keyed by id (first declaration wins).
    pub fn metric_kinds(&self) -> HashMap<&str, MetricKind> {
        let mut kinds = HashMap::new();
        for m in self.metrics() {
            kinds.entry(m.id.as_str()).or_insert(m.value_kind);
        }
        kinds
    }

    /// Copy of the model with every source span reset, for comparing models
    /// by structure alone.
    pub fn without_spans(&self) -> Model {
        let mut m = self.clone();
        m.clear_spans();
        m
    }

    pub fn clear_spans(&mut self) {
        for decl in &mut self.decls {
            clear_decl(decl);
        }
    }

    /// Structural equality: same declarations, ignoring where they were written.
    pub fn structurally_eq(&self, other: &Model) -> bool {
        self.without_spans() == other.without_spans()
    }
}

fn clear_ident(id: &mut Ident) {
    id.span = SourceSpan::default();
}

fn clear_target(t: &mut RelationTarget) {
    if let RelationTarget::Goal(id) = t {
        clear_ident(id);
    }
}

fn clear_decl(decl: &mut Decl) {
    match decl {
        Decl::Goal(g) => {
            g.span = SourceSpan::default();
            clear_ident(&mut g.id);
            g.derived_from.iter_mut().for_each(clear_ident);
            g.context_refs.iter_mut().for_each(clear_ident);
            g.assumption_refs.iter_mut().for_each(clear_ident);
            for rel in &mut g.relations {
                if let RelationRef::Typed { to, .. } = rel {
                    clear_target(to);
                }
            }
        }
        Decl::Strategy(s) => {
            s.span = SourceSpan::default();
            clear_ident(&mut s.id);
            clear_ident(&mut s.parent_goal);
            s.context_refs.iter_mut().for_each(clear_ident);
            s.assumption_refs.iter_mut().for_each(clear_ident);
        }
        Decl::Context(c) => {
            c.span = SourceSpan::default();
            clear_ident(&mut c.id);
        }
        Decl::Assumption(a) => {
            a.span = SourceSpan::default();
            clear_ident(&mut a.id);
        }
        Decl::Metric(m) => {
            m.span = SourceSpan::default();
            clear_ident(&mut m.id);
        }
        Decl::Plan(p) => {
            p.span = SourceSpan::default();
            clear_ident(&mut p.goal_ref);
            p.strategy_ref.iter_mut().for_each(clear_ident);
            p.metric_refs.iter_mut().for_each(clear_ident);
            for q in &mut p.questions {
                clear_ident(&mut q.id);
            }
            p.interpretation.satisfied_when.clear_spans();
            for rule in &mut p.interpretation.diagnostics {
                rule.span = SourceSpan::default();
                rule.condition.clear_spans();
            }
        }
        Decl::Relation(r) => {
            r.span = SourceSpan::default();
            clear_ident(&mut r.from);
            clear_target(&mut r.to);
        }
    }
}
