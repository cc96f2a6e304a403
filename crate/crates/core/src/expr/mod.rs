//! Interpretation expressions: metric histories, goal statuses and
//! three-valued logic.
//!
//! Concrete syntax, loosest to tightest binding:
//!
//! ```text
//! or  <  and  <  (< <= > >= = !=)  <  (+ -)  <  (* /)  <  (not, unary -)
//! ```
//!
//! Metric references are written `M`, `M[t]` or `M[t-k]`; `status(G)` reads
//! the status of goal `G`; the functions are `defined`, `pct_change`, `abs`,
//! `min` and `max`.

pub(crate) mod eval;
mod exact;
mod parse;
mod typecheck;
mod value;

use std::fmt::{self, Write as _};

use serde::{Serialize, Serializer};

use crate::span::SourceSpan;

pub use eval::{eval_expr, EvalEnv, MapEnv};
pub use parse::{parse_expr, parse_expr_in};
pub use typecheck::{typecheck_condition, typecheck_expr, TypeError, TypeErrorKind, ValueKind};
pub use value::{GoalStatus, Scalar, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "=",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "and",
            BinaryOp::Or => "or",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Add | BinaryOp::Sub => 4,
            BinaryOp::Mul | BinaryOp::Div => 5,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 3
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div)
    }
}

const UNARY_PRECEDENCE: u8 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Defined,
    PctChange,
    Abs,
    Min,
    Max,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Defined => "defined",
            Func::PctChange => "pct_change",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        [Func::Defined, Func::PctChange, Func::Abs, Func::Min, Func::Max]
            .into_iter()
            .find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

/// `M[t-lag]`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MetricRef {
    pub metric: String,
    pub lag: u32,
}

impl fmt::Display for MetricRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lag == 0 {
            write!(f, "{}[t]", self.metric)
        } else {
            write!(f, "{}[t-{}]", self.metric, self.lag)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Number(f64),
    Bool(bool),
    Status(GoalStatus),
    Metric(MetricRef),
    GoalStatus(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// `pct_change` always receives a single `Metric` argument.
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: SourceSpan,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Expr {
        Expr {
            kind,
            span: SourceSpan::default(),
        }
    }

    pub fn number(n: f64) -> Expr {
        Expr::new(ExprKind::Number(n))
    }

    pub fn boolean(b: bool) -> Expr {
        Expr::new(ExprKind::Bool(b))
    }

    pub fn metric(name: impl Into<String>, lag: u32) -> Expr {
        Expr::new(ExprKind::Metric(MetricRef {
            metric: name.into(),
            lag,
        }))
    }

    pub fn status_of(goal: impl Into<String>) -> Expr {
        Expr::new(ExprKind::GoalStatus(goal.into()))
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Expr {
        Expr::new(ExprKind::Unary(op, Box::new(operand)))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn call(func: Func, args: Vec<Expr>) -> Expr {
        Expr::new(ExprKind::Call(func, args))
    }

    pub fn clear_spans(&mut self) {
        self.span = SourceSpan::default();
        match &mut self.kind {
            ExprKind::Unary(_, e) => e.clear_spans(),
            ExprKind::Binary(_, l, r) => {
                l.clear_spans();
                r.clear_spans();
            }
            ExprKind::Call(_, args) => args.iter_mut().for_each(Expr::clear_spans),
            _ => {}
        }
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut dyn FnMut(&'a Expr)) {
        visit(self);
        match &self.kind {
            ExprKind::Unary(_, e) => e.walk(visit),
            ExprKind::Binary(_, l, r) => {
                l.walk(visit);
                r.walk(visit);
            }
            ExprKind::Call(_, args) => args.iter().for_each(|a| a.walk(visit)),
            _ => {}
        }
    }

    /// Every metric reference, `pct_change` arguments included, in source order.
    pub fn metric_refs(&self) -> Vec<&MetricRef> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::Metric(m) = &e.kind {
                out.push(m);
            }
        });
        out
    }

    /// Goals whose status the expression reads, with the span of each read.
    pub fn status_refs(&self) -> Vec<(&str, &SourceSpan)> {
        let mut out = Vec::new();
        self.walk(&mut |e| {
            if let ExprKind::GoalStatus(g) = &e.kind {
                out.push((g.as_str(), &e.span));
            }
        });
        out
    }

    fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Binary(op, ..) => op.precedence(),
            ExprKind::Unary(..) => UNARY_PRECEDENCE,
            _ => u8::MAX,
        }
    }

    /// Canonical text, with `leaf` given first say over how each node prints
    /// (used to annotate leaves with runtime values).
    pub fn render_with(&self, leaf: &dyn Fn(&Expr) -> Option<String>) -> String {
        let mut out = String::new();
        self.write_to(&mut out, leaf);
        out
    }

    fn write_to(&self, out: &mut String, leaf: &dyn Fn(&Expr) -> Option<String>) {
        if let Some(text) = leaf(self) {
            out.push_str(&text);
            return;
        }
        match &self.kind {
            ExprKind::Number(n) => {
                let _ = write!(out, "{n}");
            }
            ExprKind::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            ExprKind::Status(s) => out.push_str(s.keyword()),
            ExprKind::Metric(m) => {
                let _ = write!(out, "{m}");
            }
            ExprKind::GoalStatus(g) => {
                let _ = write!(out, "status({g})");
            }
            ExprKind::Unary(op, operand) => {
                out.push_str(match op {
                    UnaryOp::Not => "not ",
                    UnaryOp::Neg => "-",
                });
                // `-(3)` keeps a negated literal distinct from the literal -3.
                let literal = matches!(operand.kind, ExprKind::Number(_));
                let wrap = operand.precedence() < UNARY_PRECEDENCE
                    || (*op == UnaryOp::Neg && (literal || matches!(operand.kind, ExprKind::Unary(UnaryOp::Neg, _))));
                write_wrapped(operand, wrap, out, leaf);
            }
            ExprKind::Binary(op, lhs, rhs) => {
                let prec = op.precedence();
                // Left-associative; comparisons do not chain at all.
                let wrap_lhs = lhs.precedence() < prec || (op.is_comparison() && lhs.precedence() == prec);
                let wrap_rhs = rhs.precedence() <= prec;
                write_wrapped(lhs, wrap_lhs, out, leaf);
                let _ = write!(out, " {} ", op.symbol());
                write_wrapped(rhs, wrap_rhs, out, leaf);
            }
            ExprKind::Call(func, args) => {
                out.push_str(func.name());
                out.push('(');
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    if *func == Func::PctChange {
                        // pct_change takes the metric itself, never an annotated value.
                        if let ExprKind::Metric(m) = &arg.kind {
                            if m.lag == 0 {
                                out.push_str(&m.metric);
                            } else {
                                let _ = write!(out, "{m}");
                            }
                            continue;
                        }
                    }
                    arg.write_to(out, leaf);
                }
                out.push(')');
            }
        }
    }
}

fn write_wrapped(e: &Expr, wrap: bool, out: &mut String, leaf: &dyn Fn(&Expr) -> Option<String>) {
    if wrap {
        out.push('(');
        e.write_to(out, leaf);
        out.push(')');
    } else {
        e.write_to(out, leaf);
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&|_| None))
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
