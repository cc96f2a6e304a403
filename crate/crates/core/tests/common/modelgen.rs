//! proptest strategies for arbitrary (not necessarily valid) models.

use gqms::expr::{BinaryOp, Expr, ExprKind, Func, GoalStatus, UnaryOp};
use gqms::model::{
    Assumption, ContextFactor, Decl, DiagnosticRule, Goal, GoalType, GqmPlan, Ident, InterpretationModel, MGoal,
    MetricDecl, MetricKind, Model, Question, Relation, RelationKind, RelationRef, RelationTarget,
    Strategy as StrategyDecl,
};
use gqms::syntax::is_identifier;
use proptest::collection::vec;
use proptest::option;
use proptest::prelude::*;
use proptest::sample::select;

pub fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,5}".prop_filter("not reserved", |s| is_identifier(s))
}

fn id() -> impl Strategy<Value = Ident> {
    ident().prop_map(Ident::new)
}

/// Prose including the characters that need escaping or could be mistaken
/// for syntax.
pub fn text() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9 \"\\\\#{}\\[\\],é✓\n]{0,12}"
}

fn number() -> impl Strategy<Value = f64> {
    prop_oneof![
        select(vec![0.0, 1.0, 1.15, 0.05, 20000.0, 3.5, 1e-7, 12345.678]),
        (0u32..1000).prop_map(f64::from),
        (-1000i32..0).prop_map(f64::from),
        (0u32..100000).prop_map(|n| f64::from(n) / 1000.0),
    ]
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let metric = || (ident(), 0u32..4).prop_map(|(m, lag)| Expr::metric(m, lag));
    let leaf = prop_oneof![
        number().prop_map(Expr::number),
        any::<bool>().prop_map(Expr::boolean),
        select(vec![
            GoalStatus::Satisfied,
            GoalStatus::NotSatisfied,
            GoalStatus::Undetermined
        ])
        .prop_map(|s| Expr::new(ExprKind::Status(s))),
        metric(),
        ident().prop_map(Expr::status_of),
        metric().prop_map(|m| Expr::call(Func::PctChange, vec![m])),
    ];
    let ops = vec![
        BinaryOp::Or,
        BinaryOp::And,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            (select(vec![UnaryOp::Not, UnaryOp::Neg]), inner.clone()).prop_map(|(op, e)| Expr::unary(op, e)),
            (select(ops.clone()), inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            inner.clone().prop_map(|e| Expr::call(Func::Defined, vec![e])),
            inner.clone().prop_map(|e| Expr::call(Func::Abs, vec![e])),
            (select(vec![Func::Min, Func::Max]), inner.clone(), inner).prop_map(|(f, a, b)| Expr::call(f, vec![a, b])),
        ]
    })
}

fn relation_target() -> impl Strategy<Value = RelationTarget> {
    prop_oneof![
        id().prop_map(RelationTarget::Goal),
        text().prop_map(RelationTarget::Label)
    ]
}

fn relation_kind() -> impl Strategy<Value = RelationKind> {
    select(vec![RelationKind::Complementary, RelationKind::Competing])
}

fn relation_ref() -> impl Strategy<Value = RelationRef> {
    prop_oneof![
        (relation_kind(), relation_target()).prop_map(|(kind, to)| RelationRef::Typed { kind, to }),
        text().prop_map(RelationRef::Note),
    ]
}

fn goal() -> impl Strategy<Value = Goal> {
    (
        (id(), option::of(1u32..6), option::of(select(GoalType::ALL.to_vec()))),
        vec(text(), 6),
        (vec(text(), 0..3), vec(relation_ref(), 0..3), option::of(id())),
        (vec(id(), 0..3), vec(id(), 0..3)),
    )
        .prop_map(
            |((id, level, goal_type), fields, (constraints, relations, derived_from), (ctx, ass))| {
                let mut g = Goal::new(id.name);
                g.level = level;
                g.goal_type = goal_type;
                g.activity = fields[0].clone();
                g.focus = fields[1].clone();
                g.object = fields[2].clone();
                g.magnitude = fields[3].clone();
                g.timeframe = fields[4].clone();
                g.scope = fields[5].clone();
                g.constraints = constraints;
                g.relations = relations;
                g.derived_from = derived_from;
                g.context_refs = ctx;
                g.assumption_refs = ass;
                g
            },
        )
}

fn strategy() -> impl Strategy<Value = StrategyDecl> {
    (id(), id(), text(), vec(text(), 0..3), vec(id(), 0..3), vec(id(), 0..3)).prop_map(
        |(id, parent_goal, decision, activities, context_refs, assumption_refs)| StrategyDecl {
            id,
            parent_goal,
            decision,
            activities,
            context_refs,
            assumption_refs,
            span: Default::default(),
        },
    )
}

fn plan() -> impl Strategy<Value = GqmPlan> {
    (
        (id(), option::of(id())),
        vec(text(), 5),
        vec((id(), text()), 0..3),
        vec(id(), 0..3),
        expr(),
        vec((text(), expr()), 0..3),
    )
        .prop_map(
            |((goal_ref, strategy_ref), m, questions, metric_refs, satisfied_when, rules)| GqmPlan {
                goal_ref,
                strategy_ref,
                mgoal: MGoal {
                    object: m[0].clone(),
                    purpose: m[1].clone(),
                    focus: m[2].clone(),
                    viewpoint: m[3].clone(),
                    context: m[4].clone(),
                },
                questions: questions.into_iter().map(|(id, text)| Question { id, text }).collect(),
                metric_refs,
                interpretation: InterpretationModel {
                    satisfied_when,
                    diagnostics: rules
                        .into_iter()
                        .map(|(message, condition)| DiagnosticRule {
                            message,
                            condition,
                            span: Default::default(),
                        })
                        .collect(),
                },
                span: Default::default(),
            },
        )
}

fn decl() -> impl Strategy<Value = Decl> {
    prop_oneof![
        3 => goal().prop_map(Decl::Goal),
        2 => strategy().prop_map(Decl::Strategy),
        1 => (id(), text()).prop_map(|(id, statement)| Decl::Context(ContextFactor { id, statement, span: Default::default() })),
        1 => (id(), text()).prop_map(|(id, statement)| Decl::Assumption(Assumption { id, statement, span: Default::default() })),
        2 => (id(), select(vec![MetricKind::Number, MetricKind::Boolean]), option::of(text()), option::of(text()))
            .prop_map(|(id, value_kind, unit, period_label)| Decl::Metric(MetricDecl { id, value_kind, unit, period_label, span: Default::default() })),
        2 => plan().prop_map(Decl::Plan),
        1 => (relation_kind(), id(), relation_target())
            .prop_map(|(kind, from, to)| Decl::Relation(Relation { kind, from, to, span: Default::default() })),
    ]
}

pub fn model() -> impl Strategy<Value = Model> {
    vec(decl(), 0..8).prop_map(|decls| Model {
        name: "m".to_string(),
        decls,
    })
}
