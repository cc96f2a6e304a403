//! A second, deliberately different evaluator for the expression language.
//!
//! Truth values are ranked 0 (false) < 1 (unknown) < 2 (true), so `and` is
//! `min`, `or` is `max` and `not` is `2 - x`. Numbers and statuses carry
//! their own absence. Nothing here calls into the crate's evaluator.
//!
//! Arithmetic works on the decimal each `f64` prints as: `+ - *` on
//! `digits * 10^exp` pairs read back through `str::parse`, and `/` on
//! fractions.

use std::collections::HashMap;

use gqms::expr::{GoalStatus, Value};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone)]
pub enum R {
    Num(f64),
    Bool(bool),
    Stat(u8),
    Metric(String, u32),
    Status(String),
    Not(Box<R>),
    Neg(Box<R>),
    Arith(char, Box<R>, Box<R>),
    Cmp(&'static str, Box<R>, Box<R>),
    And(Box<R>, Box<R>),
    Or(Box<R>, Box<R>),
    Defined(Box<R>),
    Pct(String, u32),
    Abs(Box<R>),
    Min(Box<R>, Box<R>),
    Max(Box<R>, Box<R>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RV {
    Num(Option<f64>),
    Truth(u8),
    Stat(Option<u8>),
}

pub const STATUS_WORDS: [&str; 3] = ["satisfied", "not_satisfied", "undetermined"];

#[derive(Debug, Clone, Default)]
pub struct RefEnv {
    pub t: u32,
    pub numbers: HashMap<(String, u32), f64>,
    pub bools: HashMap<(String, u32), bool>,
    pub statuses: HashMap<String, u8>,
}

impl RefEnv {
    fn at(&self, lag: u32) -> Option<u32> {
        self.t.checked_sub(lag)
    }
}

/// Metric naming convention of the generated corpus: `b*` are boolean,
/// everything else is numeric.
pub fn is_boolean_metric(name: &str) -> bool {
    name.starts_with('b')
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `x` as `digits * 10^exp`, read from its `Display` text.
fn dec(x: f64) -> (BigInt, i64) {
    let text = x.to_string();
    let (int, frac) = text.split_once('.').unwrap_or((&text, ""));
    (format!("{int}{frac}").parse().unwrap(), -(frac.len() as i64))
}

fn aligned(a: f64, b: f64) -> (BigInt, BigInt, i64) {
    let ((da, ea), (db, eb)) = (dec(a), dec(b));
    let e = ea.min(eb);
    let ten = BigInt::from(10);
    (da * ten.pow((ea - e) as u32), db * ten.pow((eb - e) as u32), e)
}

fn back(digits: BigInt, exp: i64) -> Option<f64> {
    finite(format!("{digits}e{exp}").parse().unwrap())
}

fn ratio(x: f64) -> BigRational {
    let (d, e) = dec(x);
    BigRational::new(d, BigInt::from(10).pow(e.unsigned_abs() as u32))
}

fn exact(op: char, a: f64, b: f64) -> Option<f64> {
    match op {
        '+' => {
            let (x, y, e) = aligned(a, b);
            back(x + y, e)
        }
        '-' => {
            let (x, y, e) = aligned(a, b);
            back(x - y, e)
        }
        '*' => {
            let ((x, ea), (y, eb)) = (dec(a), dec(b));
            back(x * y, ea + eb)
        }
        _ => {
            let y = ratio(b);
            if y.is_zero() {
                return None;
            }
            (ratio(a) / y).to_f64().and_then(finite)
        }
    }
}

fn truth(b: bool) -> u8 {
    if b {
        2
    } else {
        0
    }
}

pub fn eval(e: &R, env: &RefEnv) -> RV {
    match e {
        R::Num(n) => RV::Num(Some(*n)),
        R::Bool(b) => RV::Truth(truth(*b)),
        R::Stat(s) => RV::Stat(Some(*s)),
        R::Metric(name, lag) => {
            let p = env.at(*lag);
            if is_boolean_metric(name) {
                RV::Truth(
                    p.and_then(|p| env.bools.get(&(name.clone(), p)))
                        .map_or(1, |b| truth(*b)),
                )
            } else {
                RV::Num(p.and_then(|p| env.numbers.get(&(name.clone(), p))).copied())
            }
        }
        R::Status(g) => RV::Stat(env.statuses.get(g).copied()),
        R::Not(x) => match eval(x, env) {
            RV::Truth(v) => RV::Truth(2 - v),
            _ => unreachable!("typed"),
        },
        R::Neg(x) => RV::Num(num(x, env).map(|v| -v)),
        R::Arith(op, a, b) => {
            let (a, b) = (num(a, env), num(b, env));
            RV::Num(match (a, b) {
                (Some(a), Some(b)) => exact(*op, a, b),
                _ => None,
            })
        }
        R::Cmp(op, a, b) => {
            let (x, y) = (eval(a, env), eval(b, env));
            let ord = match (x, y) {
                (RV::Num(Some(a)), RV::Num(Some(b))) => a.partial_cmp(&b),
                (RV::Stat(Some(a)), RV::Stat(Some(b))) => Some(a.cmp(&b)),
                _ => return RV::Truth(1),
            };
            let ord = ord.expect("finite");
            use std::cmp::Ordering::*;
            RV::Truth(truth(match *op {
                "<" => ord == Less,
                "<=" => ord != Greater,
                ">" => ord == Greater,
                ">=" => ord != Less,
                "=" => ord == Equal,
                "!=" => ord != Equal,
                _ => unreachable!(),
            }))
        }
        R::And(a, b) => RV::Truth(tv(a, env).min(tv(b, env))),
        R::Or(a, b) => RV::Truth(tv(a, env).max(tv(b, env))),
        R::Defined(x) => RV::Truth(truth(!matches!(
            eval(x, env),
            RV::Num(None) | RV::Truth(1) | RV::Stat(None)
        ))),
        R::Pct(name, lag) => {
            let cur = env.at(*lag).and_then(|p| env.numbers.get(&(name.clone(), p)));
            let prev = env.at(*lag + 1).and_then(|p| env.numbers.get(&(name.clone(), p)));
            RV::Num(match (cur, prev) {
                (Some(c), Some(p)) => {
                    let (x, y, e) = aligned(*c, *p);
                    let diff = BigRational::new(x - y, BigInt::from(10).pow(e.unsigned_abs() as u32));
                    let p = ratio(*p);
                    if p.is_zero() {
                        None
                    } else {
                        (diff / p).to_f64().and_then(finite)
                    }
                }
                _ => None,
            })
        }
        R::Abs(x) => RV::Num(num(x, env).map(f64::abs)),
        R::Min(a, b) => RV::Num(match (num(a, env), num(b, env)) {
            (Some(a), Some(b)) => Some(if b < a { b } else { a }),
            _ => None,
        }),
        R::Max(a, b) => RV::Num(match (num(a, env), num(b, env)) {
            (Some(a), Some(b)) => Some(if b > a { b } else { a }),
            _ => None,
        }),
    }
}

fn num(e: &R, env: &RefEnv) -> Option<f64> {
    match eval(e, env) {
        RV::Num(n) => n,
        _ => unreachable!("typed"),
    }
}

fn tv(e: &R, env: &RefEnv) -> u8 {
    match eval(e, env) {
        RV::Truth(v) => v,
        _ => unreachable!("typed"),
    }
}

pub fn status_of(code: u8) -> GoalStatus {
    [
        GoalStatus::Satisfied,
        GoalStatus::NotSatisfied,
        GoalStatus::Undetermined,
    ][code as usize]
}

/// The crate's value for a reference result.
pub fn to_value(v: RV) -> Value {
    match v {
        RV::Num(Some(n)) => Value::Number(n),
        RV::Truth(0) => Value::Bool(false),
        RV::Truth(2) => Value::Bool(true),
        RV::Stat(Some(s)) => Value::Status(status_of(s)),
        _ => Value::Unknown,
    }
}

/// Fully parenthesized source text.
pub fn text(e: &R) -> String {
    match e {
        R::Num(n) => format!("{n}"),
        R::Bool(b) => b.to_string(),
        R::Stat(s) => STATUS_WORDS[*s as usize].to_string(),
        R::Metric(name, 0) => format!("{name}[t]"),
        R::Metric(name, lag) => format!("{name}[t-{lag}]"),
        R::Status(g) => format!("status({g})"),
        R::Not(x) => format!("not ({})", text(x)),
        R::Neg(x) => format!("-({})", text(x)),
        R::Arith(op, a, b) => format!("({}) {op} ({})", text(a), text(b)),
        R::Cmp(op, a, b) => format!("({}) {op} ({})", text(a), text(b)),
        R::And(a, b) => format!("({}) and ({})", text(a), text(b)),
        R::Or(a, b) => format!("({}) or ({})", text(a), text(b)),
        R::Defined(x) => format!("defined({})", text(x)),
        R::Pct(name, 0) => format!("pct_change({name})"),
        R::Pct(name, lag) => format!("pct_change({name}[t-{lag}])"),
        R::Abs(x) => format!("abs({})", text(x)),
        R::Min(a, b) => format!("min({}, {})", text(a), text(b)),
        R::Max(a, b) => format!("max({}, {})", text(a), text(b)),
    }
}
