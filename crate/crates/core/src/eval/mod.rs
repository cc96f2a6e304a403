//! Bottom-up goal status computation and diagnostic rules.

mod explain;

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::data::{Dataset, Scalar};
use crate::diagnostic::{has_errors, Diagnostic};
use crate::expr::eval::{and, lookup};
use crate::expr::{eval_expr, EvalEnv, Expr, ExprKind, Func, GoalStatus, Value};
use crate::model::{derivation_order, descendants, detect_conflicts, validate, GqmPlan, Model};

pub use explain::{explain, Explanation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("model has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
    #[error("satisfied-when clause of {goal} reads status({referenced}), which is not below it")]
    StatusScope { goal: String, referenced: String },
    #[error("empty period range {from}..{to}")]
    EmptyRange { from: u32, to: u32 },
    #[error("unknown goal `{0}`")]
    UnknownGoal(String),
}

/// One metric value read while evaluating a goal. `period` is negative when a
/// lag reached before the first period.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputUse {
    pub metric: String,
    pub period: i64,
    pub value: Option<Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanTrace {
    pub plan: String,
    pub value: Value,
    /// The condition with each leaf annotated by its runtime value.
    pub annotated: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoalOutcome {
    pub goal: String,
    pub level: Option<u32>,
    pub status: GoalStatus,
    pub plans: Vec<PlanTrace>,
    pub inputs: Vec<InputUse>,
}

impl GoalOutcome {
    pub fn has_plan(&self) -> bool {
        !self.plans.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub goal: String,
    pub message: String,
}

/// Result of evaluating a model at one period. Goals appear in declaration
/// order; findings in goal, plan, rule order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub period: u32,
    pub goals: Vec<GoalOutcome>,
    pub findings: Vec<Finding>,
    pub conflicts: Vec<Diagnostic>,
}

impl EvaluationReport {
    pub fn outcome(&self, goal: &str) -> Option<&GoalOutcome> {
        self.goals.iter().find(|g| g.goal == goal)
    }

    pub fn status(&self, goal: &str) -> Option<GoalStatus> {
        self.outcome(goal).map(|g| g.status)
    }

    pub fn statuses(&self) -> Vec<(&str, GoalStatus)> {
        self.goals.iter().map(|g| (g.goal.as_str(), g.status)).collect()
    }

    pub fn findings_for<'a>(&'a self, goal: &'a str) -> impl Iterator<Item = &'a Finding> + 'a {
        self.findings.iter().filter(move |f| f.goal == goal)
    }
}

struct DataEnv<'a> {
    dataset: &'a Dataset,
    period: u32,
    statuses: &'a HashMap<String, GoalStatus>,
}

impl EvalEnv for DataEnv<'_> {
    fn period(&self) -> u32 {
        self.period
    }

    fn metric(&self, metric: &str, period: u32) -> Option<Scalar> {
        self.dataset.get(metric, period)
    }

    fn status(&self, goal: &str) -> Option<GoalStatus> {
        self.statuses.get(goal).copied()
    }
}

/// Evaluates every goal at `period`.
///
/// Statuses are computed leaves first from each goal's `satisfied when`
/// clauses (several plans for one goal are combined with `and`). Diagnostic
/// rules run afterwards against the complete set of statuses and only add
/// findings.
pub fn evaluate(model: &Model, dataset: &Dataset, period: u32) -> Result<EvaluationReport, EvalError> {
    check(model)?;
    Ok(evaluate_checked(model, dataset, period))
}

/// One report per period in `from..=to`.
pub fn evaluate_series(
    model: &Model,
    dataset: &Dataset,
    from: u32,
    to: u32,
) -> Result<Vec<EvaluationReport>, EvalError> {
    if from > to {
        return Err(EvalError::EmptyRange { from, to });
    }
    check(model)?;
    Ok((from..=to).map(|t| evaluate_checked(model, dataset, t)).collect())
}

fn check(model: &Model) -> Result<(), EvalError> {
    let diagnostics = validate(model, false);
    if has_errors(&diagnostics) {
        return Err(EvalError::Invalid(diagnostics));
    }
    for plan in model.plans() {
        let goal = plan.goal_ref.as_str();
        let below: HashSet<String> = descendants(model, goal).into_iter().collect();
        for (referenced, _) in plan.interpretation.satisfied_when.status_refs() {
            if !below.contains(referenced) {
                return Err(EvalError::StatusScope {
                    goal: goal.to_string(),
                    referenced: referenced.to_string(),
                });
            }
        }
    }
    Ok(())
}

fn evaluate_checked(model: &Model, dataset: &Dataset, period: u32) -> EvaluationReport {
    let order = derivation_order(model).expect("validated models are acyclic");
    let mut statuses: HashMap<String, GoalStatus> = HashMap::new();
    let mut traces: HashMap<String, Vec<PlanTrace>> = HashMap::new();

    for goal in &order {
        let mut plans = Vec::new();
        let mut verdict: Option<Value> = None;
        for plan in model.plans_for(goal) {
            let env = DataEnv {
                dataset,
                period,
                statuses: &statuses,
            };
            let cond = &plan.interpretation.satisfied_when;
            let value = eval_expr(cond, &env);
            verdict = Some(verdict.map_or(value, |v| and(v, value)));
            plans.push(PlanTrace {
                plan: plan.label(),
                value,
                annotated: annotate(cond, &env),
            });
        }
        let status = verdict.map_or(GoalStatus::Undetermined, |v| GoalStatus::from_value(&v));
        statuses.insert(goal.clone(), status);
        traces.insert(goal.clone(), plans);
    }

    let env = DataEnv {
        dataset,
        period,
        statuses: &statuses,
    };
    let mut goals = Vec::new();
    let mut findings = Vec::new();
    for goal in model.goals() {
        let id = goal.id.as_str();
        let plans: Vec<&GqmPlan> = model.plans_for(id).collect();
        for plan in &plans {
            for rule in &plan.interpretation.diagnostics {
                if eval_expr(&rule.condition, &env) == Value::Bool(true) {
                    findings.push(Finding {
                        goal: id.to_string(),
                        message: rule.message.clone(),
                    });
                }
            }
        }
        goals.push(GoalOutcome {
            goal: id.to_string(),
            level: goal.level,
            status: statuses[id],
            plans: traces.remove(id).unwrap_or_default(),
            inputs: inputs_of(&plans, &env),
        });
    }

    EvaluationReport {
        period,
        goals,
        findings,
        conflicts: detect_conflicts(model),
    }
}

/// Metric values read by the plans' `satisfied when` clauses, first use first.
fn inputs_of(plans: &[&GqmPlan], env: &DataEnv<'_>) -> Vec<InputUse> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut record = |metric: &str, lag: u32| {
        let period = i64::from(env.period) - i64::from(lag);
        if seen.insert((metric.to_string(), period)) {
            let value = u32::try_from(period).ok().and_then(|p| env.dataset.get(metric, p));
            out.push(InputUse {
                metric: metric.to_string(),
                period,
                value,
            });
        }
    };
    for plan in plans {
        plan.interpretation.satisfied_when.walk(&mut |e| match &e.kind {
            ExprKind::Metric(m) => record(&m.metric, m.lag),
            ExprKind::Call(Func::PctChange, args) => {
                if let Some(ExprKind::Metric(m)) = args.first().map(|a| &a.kind) {
                    record(&m.metric, m.lag);
                    record(&m.metric, m.lag + 1);
                }
            }
            _ => {}
        });
    }
    out
}

fn annotate(expr: &Expr, env: &dyn EvalEnv) -> String {
    let body = expr.render_with(&|e| match &e.kind {
        ExprKind::Metric(m) => Some(match lookup(m, 0, env) {
            Value::Unknown => format!("{m}: missing"),
            v => format!("{m}={v}"),
        }),
        ExprKind::GoalStatus(_) | ExprKind::Call(Func::PctChange, _) => {
            let text = e.render_with(&|_| None);
            Some(match eval_expr(e, env) {
                Value::Unknown => format!("{text}: missing"),
                v => format!("{text}={v}"),
            })
        }
        _ => None,
    });
    format!("{body} ⇒ {}", eval_expr(expr, env))
}
