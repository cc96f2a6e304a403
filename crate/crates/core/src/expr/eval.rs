use std::collections::HashMap;

use crate::expr::{exact, BinaryOp, Expr, ExprKind, Func, GoalStatus, MetricRef, Scalar, UnaryOp, Value};

/// Where an evaluation reads its inputs from.
pub trait EvalEnv {
    /// The period `t` that lags are relative to.
    fn period(&self) -> u32;
    fn metric(&self, metric: &str, period: u32) -> Option<Scalar>;
    fn status(&self, goal: &str) -> Option<GoalStatus>;
}

/// An in-memory environment.
#[derive(Debug, Clone, Default)]
pub struct MapEnv {
    pub period: u32,
    pub metrics: HashMap<(String, u32), Scalar>,
    pub statuses: HashMap<String, GoalStatus>,
}

impl MapEnv {
    pub fn at(period: u32) -> Self {
        MapEnv {
            period,
            ..MapEnv::default()
        }
    }

    pub fn with_metric(mut self, metric: &str, period: u32, value: Scalar) -> Self {
        self.metrics.insert((metric.to_string(), period), value);
        self
    }

    pub fn with_number(self, metric: &str, period: u32, value: f64) -> Self {
        self.with_metric(metric, period, Scalar::Number(value))
    }

    pub fn with_status(mut self, goal: &str, status: GoalStatus) -> Self {
        self.statuses.insert(goal.to_string(), status);
        self
    }
}

impl EvalEnv for MapEnv {
    fn period(&self) -> u32 {
        self.period
    }

    fn metric(&self, metric: &str, period: u32) -> Option<Scalar> {
        self.metrics.get(&(metric.to_string(), period)).copied()
    }

    fn status(&self, goal: &str) -> Option<GoalStatus> {
        self.statuses.get(goal).copied()
    }
}

pub(crate) fn lookup(m: &MetricRef, extra_lag: u32, env: &dyn EvalEnv) -> Value {
    env.period()
        .checked_sub(m.lag)
        .and_then(|p| p.checked_sub(extra_lag))
        .and_then(|p| env.metric(&m.metric, p))
        .map_or(Value::Unknown, Value::from)
}

/// `(M[t] - M[t-1]) / M[t-1]`, relative to the reference's own lag.
pub(crate) fn pct_change(m: &MetricRef, env: &dyn EvalEnv) -> Value {
    match (lookup(m, 0, env), lookup(m, 1, env)) {
        (Value::Number(cur), Value::Number(prev)) => {
            exact::relative_change(cur, prev).map_or(Value::Unknown, Value::Number)
        }
        _ => Value::Unknown,
    }
}

pub(crate) fn and(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Bool(false), _) | (_, Value::Bool(false)) => Value::Bool(false),
        (Value::Bool(true), Value::Bool(true)) => Value::Bool(true),
        _ => Value::Unknown,
    }
}

fn or(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Bool(true), _) | (_, Value::Bool(true)) => Value::Bool(true),
        (Value::Bool(false), Value::Bool(false)) => Value::Bool(false),
        _ => Value::Unknown,
    }
}

fn binary(op: BinaryOp, a: Value, b: Value) -> Value {
    match op {
        BinaryOp::And => return and(a, b),
        BinaryOp::Or => return or(a, b),
        _ => {}
    }
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
                exact::arith(op, x, y).map_or(Value::Unknown, Value::Number)
            }
            BinaryOp::Lt => Value::Bool(x < y),
            BinaryOp::Le => Value::Bool(x <= y),
            BinaryOp::Gt => Value::Bool(x > y),
            BinaryOp::Ge => Value::Bool(x >= y),
            BinaryOp::Eq => Value::Bool(x == y),
            BinaryOp::Ne => Value::Bool(x != y),
            BinaryOp::And | BinaryOp::Or => unreachable!(),
        },
        (Value::Status(x), Value::Status(y)) => match op {
            BinaryOp::Eq => Value::Bool(x == y),
            BinaryOp::Ne => Value::Bool(x != y),
            _ => Value::Unknown,
        },
        _ => Value::Unknown,
    }
}

/// Evaluates `expr` under strong Kleene semantics.
///
/// Arithmetic is exact on the decimals the numbers are written as, rounded
/// once per operation. Missing data, lags reaching before period 0, division
/// by zero and overflow all produce `Unknown`; arithmetic and comparisons
/// are strict in `Unknown`, `and` is decided by any `false` and `or` by any
/// `true`. `defined(x)` is the only construct that observes `Unknown`.
pub fn eval_expr(expr: &Expr, env: &dyn EvalEnv) -> Value {
    match &expr.kind {
        ExprKind::Number(n) => Value::number(*n),
        ExprKind::Bool(b) => Value::Bool(*b),
        ExprKind::Status(s) => Value::Status(*s),
        ExprKind::Metric(m) => lookup(m, 0, env),
        ExprKind::GoalStatus(g) => env.status(g).map_or(Value::Unknown, Value::Status),
        ExprKind::Unary(op, x) => match (op, eval_expr(x, env)) {
            (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
            (UnaryOp::Neg, Value::Number(n)) => Value::number(-n),
            _ => Value::Unknown,
        },
        ExprKind::Binary(op, l, r) => binary(*op, eval_expr(l, env), eval_expr(r, env)),
        ExprKind::Call(func, args) => match func {
            Func::Defined => Value::Bool(!eval_expr(&args[0], env).is_unknown()),
            Func::PctChange => match &args[0].kind {
                ExprKind::Metric(m) => pct_change(m, env),
                _ => Value::Unknown,
            },
            Func::Abs => match eval_expr(&args[0], env) {
                Value::Number(n) => Value::number(n.abs()),
                _ => Value::Unknown,
            },
            Func::Min | Func::Max => match (eval_expr(&args[0], env), eval_expr(&args[1], env)) {
                (Value::Number(a), Value::Number(b)) => {
                    Value::number(if *func == Func::Min { a.min(b) } else { a.max(b) })
                }
                _ => Value::Unknown,
            },
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn eval(text: &str, env: &MapEnv) -> Value {
        eval_expr(&parse_expr(text).unwrap(), env)
    }

    const PROFIT: &str = "P[t] > 1.15*P[t-1]";

    #[test]
    fn profit_rule_with_full_data() {
        let env = MapEnv::at(2).with_number("P", 2, 116.0).with_number("P", 1, 100.0);
        assert_eq!(eval(PROFIT, &env), Value::Bool(true));
    }

    #[test]
    fn profit_rule_boundary_is_exact() {
        let env = MapEnv::at(2).with_number("P", 2, 115.0).with_number("P", 1, 100.0);
        assert_eq!(eval(PROFIT, &env), Value::Bool(false));
        assert_eq!(eval("1.15 * P[t-1] = 115", &env), Value::Bool(true));
    }

    #[test]
    fn profit_rule_missing_current() {
        let env = MapEnv::at(2).with_number("P", 1, 100.0);
        assert_eq!(eval(PROFIT, &env), Value::Unknown);
    }

    #[test]
    fn lag_before_period_zero_is_unknown() {
        let env = MapEnv::at(0).with_number("P", 0, 100.0);
        assert_eq!(eval("P[t-1]", &env), Value::Unknown);
        assert_eq!(eval(PROFIT, &env), Value::Unknown);
    }

    #[test]
    fn kleene_dominance() {
        let env = MapEnv::at(0);
        assert_eq!(eval("false and X", &env), Value::Bool(false));
        assert_eq!(eval("X and false", &env), Value::Bool(false));
        assert_eq!(eval("true or X", &env), Value::Bool(true));
        assert_eq!(eval("true and X", &env), Value::Unknown);
        assert_eq!(eval("not X", &env), Value::Unknown);
    }

    #[test]
    fn pct_change_is_strictly_compared() {
        let env = MapEnv::at(3)
            .with_number("new_M_reqs", 3, 105.0)
            .with_number("new_M_reqs", 2, 100.0);
        assert_eq!(eval("pct_change(new_M_reqs) > 0.05", &env), Value::Bool(false));
        assert_eq!(eval("pct_change(new_M_reqs)", &env), Value::Number(0.05));
    }

    #[test]
    fn pct_change_zero_baseline_and_division_by_zero() {
        let env = MapEnv::at(1).with_number("m", 1, 5.0).with_number("m", 0, 0.0);
        assert_eq!(eval("pct_change(m)", &env), Value::Unknown);
        assert_eq!(eval("m / m[t-1]", &env), Value::Unknown);
        assert_eq!(eval("defined(m / m[t-1])", &env), Value::Bool(false));
        assert_eq!(eval("defined(m)", &env), Value::Bool(true));
    }

    #[test]
    fn overflow_is_unknown() {
        let env = MapEnv::at(0).with_number("m", 0, f64::MAX);
        assert_eq!(eval("m * 2", &env), Value::Unknown);
    }

    #[test]
    fn status_comparison() {
        let env = MapEnv::at(0).with_status("G2", GoalStatus::Undetermined);
        assert_eq!(eval("status(G2) = undetermined", &env), Value::Bool(true));
        assert_eq!(eval("status(G2) = satisfied", &env), Value::Bool(false));
        assert_eq!(eval("status(G1) = satisfied", &env), Value::Unknown);
    }
}
