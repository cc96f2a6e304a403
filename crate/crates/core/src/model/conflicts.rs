use std::collections::{BTreeMap, HashSet};

use crate::diagnostic::{codes, Diagnostic};
use crate::expr::{BinaryOp, Expr, ExprKind, Func, UnaryOp};
use crate::model::{Model, RelationKind, RelationTarget};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Polarity {
    Pos,
    Neg,
    Mixed,
}

impl Polarity {
    fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            Polarity::Mixed => Polarity::Mixed,
        }
    }

    fn join(self, other: Polarity) -> Polarity {
        if self == other {
            self
        } else {
            Polarity::Mixed
        }
    }
}

type Polarities = BTreeMap<String, Polarity>;

fn flip_all(mut p: Polarities) -> Polarities {
    p.values_mut().for_each(|v| *v = v.flip());
    p
}

fn merge(mut a: Polarities, b: Polarities) -> Polarities {
    for (k, v) in b {
        a.entry(k).and_modify(|cur| *cur = cur.join(v)).or_insert(v);
    }
    a
}

fn mixed(a: Polarities, b: Polarities) -> Polarities {
    let mut out = merge(a, b);
    out.values_mut().for_each(|v| *v = Polarity::Mixed);
    out
}

fn scale(p: Polarities, factor: &Expr) -> Option<Polarities> {
    match factor.kind {
        ExprKind::Number(c) if c > 0.0 => Some(p),
        ExprKind::Number(c) if c < 0.0 => Some(flip_all(p)),
        ExprKind::Number(_) => Some(Polarities::new()),
        _ => None,
    }
}

/// How the value of `e` moves as the *current* value of each metric grows.
/// Lagged references are baselines and do not count.
fn polarity(e: &Expr) -> Polarities {
    let mut out = Polarities::new();
    match &e.kind {
        ExprKind::Metric(m) if m.lag == 0 => {
            out.insert(m.metric.clone(), Polarity::Pos);
        }
        ExprKind::Call(Func::PctChange, args) => {
            if let ExprKind::Metric(m) = &args[0].kind {
                if m.lag == 0 {
                    out.insert(m.metric.clone(), Polarity::Pos);
                }
            }
        }
        ExprKind::Call(Func::Min | Func::Max, args) => {
            out = merge(polarity(&args[0]), polarity(&args[1]));
        }
        ExprKind::Call(Func::Abs, args) => out = mixed(polarity(&args[0]), Polarities::new()),
        ExprKind::Unary(UnaryOp::Neg, x) => out = flip_all(polarity(x)),
        ExprKind::Binary(op, l, r) => {
            let (pl, pr) = (polarity(l), polarity(r));
            out = match op {
                BinaryOp::Add => merge(pl, pr),
                BinaryOp::Sub => merge(pl, flip_all(pr)),
                BinaryOp::Mul => scale(pl.clone(), r)
                    .or_else(|| scale(pr.clone(), l))
                    .unwrap_or_else(|| mixed(pl, pr)),
                BinaryOp::Div => scale(pl.clone(), r).unwrap_or_else(|| mixed(pl, pr)),
                _ => Polarities::new(),
            };
        }
        _ => {}
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Up,
    Down,
}

/// Monotone requirements a condition places on metrics for it to hold.
fn requirements(e: &Expr, negated: bool, out: &mut Vec<(String, Direction, SourceSpan)>) {
    match &e.kind {
        ExprKind::Unary(UnaryOp::Not, x) => requirements(x, !negated, out),
        ExprKind::Binary(BinaryOp::And | BinaryOp::Or, l, r) => {
            requirements(l, negated, out);
            requirements(r, negated, out);
        }
        ExprKind::Binary(op @ (BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge), l, r) => {
            let wants_larger = matches!(op, BinaryOp::Gt | BinaryOp::Ge) != negated;
            let influence = merge(polarity(l), flip_all(polarity(r)));
            for (metric, pol) in influence {
                let dir = match (pol, wants_larger) {
                    (Polarity::Pos, true) | (Polarity::Neg, false) => Direction::Up,
                    (Polarity::Neg, true) | (Polarity::Pos, false) => Direction::Down,
                    (Polarity::Mixed, _) => continue,
                };
                out.push((metric, dir, e.span.clone()));
            }
        }
        _ => {}
    }
}

/// Conflict warnings: every declared `competing` relation (each unordered
/// pair once), and every metric that one plan needs to rise while another
/// plan needs it to fall.
pub fn detect_conflicts(model: &Model) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut pairs = HashSet::new();
    for rel in model.all_relations() {
        if rel.kind != RelationKind::Competing {
            continue;
        }
        let (key, message) = match &rel.to {
            RelationTarget::Goal(to) => {
                let mut key = [rel.from.name.clone(), to.name.clone()];
                key.sort();
                (key, format!("goals {} and {to} are declared as competing", rel.from))
            }
            RelationTarget::Label(label) => (
                [rel.from.name.clone(), format!("\"{label}\"")],
                format!("goal {} competes with \"{label}\"", rel.from),
            ),
        };
        if pairs.insert(key) {
            out.push(Diagnostic::warning(codes::CONFLICT, &rel.span, message));
        }
    }

    // Per plan: metric -> single direction (plans that pull one metric both
    // ways are left alone).
    let plans: Vec<_> = model.plans().collect();
    let mut per_plan: Vec<BTreeMap<String, (Direction, SourceSpan)>> = Vec::new();
    for p in &plans {
        let mut reqs = Vec::new();
        requirements(&p.interpretation.satisfied_when, false, &mut reqs);
        let mut dirs: BTreeMap<String, Option<(Direction, SourceSpan)>> = BTreeMap::new();
        for (metric, dir, span) in reqs {
            dirs.entry(metric)
                .and_modify(|cur| {
                    if cur.as_ref().is_some_and(|(d, _)| *d != dir) {
                        *cur = None;
                    }
                })
                .or_insert(Some((dir, span)));
        }
        per_plan.push(dirs.into_iter().filter_map(|(m, d)| d.map(|d| (m, d))).collect());
    }
    for j in 0..plans.len() {
        for i in 0..j {
            for (metric, (dir_j, span)) in &per_plan[j] {
                let Some((dir_i, _)) = per_plan[i].get(metric) else {
                    continue;
                };
                if dir_i == dir_j {
                    continue;
                }
                let (rise, fall) = if *dir_i == Direction::Up {
                    (plans[i].label(), plans[j].label())
                } else {
                    (plans[j].label(), plans[i].label())
                };
                out.push(Diagnostic::warning(
                    codes::CONFLICT,
                    span,
                    format!(
                        "metric `{metric}`: plan for {rise} requires it to rise, plan for {fall} requires it to fall"
                    ),
                ));
            }
        }
    }
    out
}
