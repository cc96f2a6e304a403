use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::expr::{BinaryOp, Expr, ExprKind, Func, UnaryOp};
use crate::model::{MetricKind, Model};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    Number,
    Bool,
    Status,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::Number => "number",
            ValueKind::Bool => "boolean",
            ValueKind::Status => "status",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TypeErrorKind {
    Mismatch { expected: String, found: ValueKind },
    UnknownMetric(String),
    UnknownGoal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeError {
    pub span: SourceSpan,
    pub kind: TypeErrorKind,
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            TypeErrorKind::Mismatch { expected, found } => write!(f, "expected {expected}, found {found}"),
            TypeErrorKind::UnknownMetric(m) => write!(f, "undeclared metric `{m}`"),
            TypeErrorKind::UnknownGoal(g) => write!(f, "unknown goal `{g}`"),
        }
    }
}

/// `None` marks a subexpression that already failed, so one mistake yields
/// one error.
type Ty = Option<ValueKind>;

struct Checker<'m> {
    metrics: HashMap<&'m str, MetricKind>,
    goals: HashSet<&'m str>,
    errors: Vec<TypeError>,
}

impl Checker<'_> {
    fn mismatch(&mut self, span: &SourceSpan, expected: &str, found: ValueKind) {
        self.errors.push(TypeError {
            span: span.clone(),
            kind: TypeErrorKind::Mismatch {
                expected: expected.to_string(),
                found,
            },
        });
    }

    fn require(&mut self, e: &Expr, want: ValueKind) -> Ty {
        match self.check(e) {
            Some(k) if k != want => {
                self.mismatch(&e.span, &want.to_string(), k);
                None
            }
            other => other,
        }
    }

    fn check(&mut self, e: &Expr) -> Ty {
        match &e.kind {
            ExprKind::Number(_) => Some(ValueKind::Number),
            ExprKind::Bool(_) => Some(ValueKind::Bool),
            ExprKind::Status(_) => Some(ValueKind::Status),
            ExprKind::Metric(m) => match self.metrics.get(m.metric.as_str()) {
                Some(MetricKind::Number) => Some(ValueKind::Number),
                Some(MetricKind::Boolean) => Some(ValueKind::Bool),
                None => {
                    self.errors.push(TypeError {
                        span: e.span.clone(),
                        kind: TypeErrorKind::UnknownMetric(m.metric.clone()),
                    });
                    None
                }
            },
            ExprKind::GoalStatus(g) => {
                if self.goals.contains(g.as_str()) {
                    Some(ValueKind::Status)
                } else {
                    self.errors.push(TypeError {
                        span: e.span.clone(),
                        kind: TypeErrorKind::UnknownGoal(g.clone()),
                    });
                    None
                }
            }
            ExprKind::Unary(UnaryOp::Not, x) => self.require(x, ValueKind::Bool).map(|_| ValueKind::Bool),
            ExprKind::Unary(UnaryOp::Neg, x) => self.require(x, ValueKind::Number),
            ExprKind::Binary(op, l, r) => match op {
                BinaryOp::And | BinaryOp::Or => {
                    let a = self.require(l, ValueKind::Bool);
                    let b = self.require(r, ValueKind::Bool);
                    a.and(b)
                }
                BinaryOp::Eq | BinaryOp::Ne => {
                    let a = self.check(l);
                    let b = self.check(r);
                    let comparable = |k: ValueKind| matches!(k, ValueKind::Number | ValueKind::Status);
                    match (a, b) {
                        (Some(a), Some(b)) if a == b && comparable(a) => Some(ValueKind::Bool),
                        (Some(a), Some(b)) if comparable(a) => {
                            self.mismatch(&r.span, &a.to_string(), b);
                            None
                        }
                        (Some(a), _) if !comparable(a) => {
                            self.mismatch(&l.span, "number or status", a);
                            None
                        }
                        (_, Some(b)) if !comparable(b) => {
                            self.mismatch(&r.span, "number or status", b);
                            None
                        }
                        _ => None,
                    }
                }
                _ => {
                    let a = self.require(l, ValueKind::Number);
                    let b = self.require(r, ValueKind::Number);
                    a.and(b)?;
                    Some(if op.is_comparison() {
                        ValueKind::Bool
                    } else {
                        ValueKind::Number
                    })
                }
            },
            ExprKind::Call(func, args) => match func {
                Func::Defined => {
                    self.check(&args[0])?;
                    Some(ValueKind::Bool)
                }
                Func::PctChange | Func::Abs | Func::Min | Func::Max => {
                    let mut ok = true;
                    for arg in args {
                        ok &= self.require(arg, ValueKind::Number).is_some();
                    }
                    ok.then_some(ValueKind::Number)
                }
            },
        }
    }
}

fn checker(model: &Model) -> Checker<'_> {
    Checker {
        metrics: model.metric_kinds(),
        goals: model.goals().map(|g| g.id.as_str()).collect(),
        errors: Vec::new(),
    }
}

/// Infers the kind of `expr` against the metric and goal declarations of `model`.
pub fn typecheck_expr(expr: &Expr, model: &Model) -> Result<ValueKind, Vec<TypeError>> {
    let mut c = checker(model);
    let ty = c.check(expr);
    match ty {
        Some(k) if c.errors.is_empty() => Ok(k),
        _ => Err(c.errors),
    }
}

/// Checks a `satisfied when` or diagnostic condition, which must be boolean.
pub fn typecheck_condition(expr: &Expr, model: &Model) -> Result<(), Vec<TypeError>> {
    let mut c = checker(model);
    c.require(expr, ValueKind::Bool);
    if c.errors.is_empty() {
        Ok(())
    } else {
        Err(c.errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::syntax::parse_model;

    fn model() -> Model {
        parse_model(
            "metric P: number\nmetric moscow_followed: boolean\ngoal G2 { level 1 }",
            "m.gqms",
        )
        .unwrap()
    }

    fn check(text: &str) -> Result<ValueKind, Vec<TypeError>> {
        typecheck_expr(&parse_expr(text).unwrap(), &model())
    }

    #[test]
    fn numeric_comparison_is_boolean() {
        assert_eq!(check("P[t] > 1.15 * P[t-1]"), Ok(ValueKind::Bool));
    }

    #[test]
    fn boolean_in_arithmetic_is_rejected() {
        let errs = check("moscow_followed + 1").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(
            errs[0].kind,
            TypeErrorKind::Mismatch {
                expected: "number".into(),
                found: ValueKind::Bool
            }
        );
        assert_eq!(errs[0].to_string(), "expected number, found boolean");
    }

    #[test]
    fn status_equality() {
        assert_eq!(check("status(G2) = satisfied"), Ok(ValueKind::Bool));
        assert!(check("status(G2) = 1").is_err());
        assert!(check("moscow_followed = true").is_err());
        assert!(check("status(G2) < satisfied").is_err());
    }

    #[test]
    fn unknown_references() {
        let errs = check("Q > 1 and status(G9) = satisfied").unwrap_err();
        assert_eq!(
            errs.iter().map(|e| e.kind.clone()).collect::<Vec<_>>(),
            vec![
                TypeErrorKind::UnknownMetric("Q".into()),
                TypeErrorKind::UnknownGoal("G9".into())
            ]
        );
    }

    #[test]
    fn functions() {
        assert_eq!(check("defined(moscow_followed)"), Ok(ValueKind::Bool));
        assert_eq!(check("min(P, abs(P[t-1]))"), Ok(ValueKind::Number));
        assert!(check("pct_change(moscow_followed) > 0").is_err());
    }

    #[test]
    fn condition_root_must_be_boolean() {
        let m = model();
        assert!(typecheck_condition(&parse_expr("P + 1").unwrap(), &m).is_err());
        assert!(typecheck_condition(&parse_expr("moscow_followed").unwrap(), &m).is_ok());
    }
}
