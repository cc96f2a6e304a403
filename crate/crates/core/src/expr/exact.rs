//! Decimal-exact arithmetic on `f64` values.
//!
//! Every finite `f64` stands for the shortest decimal that reads back as it
//! (`1.15`, not `1.149999999999999911182158029987...`). Operations run on
//! those decimals as exact fractions and round once to the nearest `f64`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::expr::BinaryOp;

/// `x` as the exact fraction of its shortest decimal form.
pub(crate) fn decimal(x: f64) -> BigRational {
    let text = format!("{x:e}");
    let (mantissa, exp) = text.split_once('e').expect("exponent form");
    let exp: i64 = exp.parse().expect("exponent");
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().expect("digits");
    let scale = exp - frac.len() as i64;
    let power = BigInt::from(10).pow(scale.unsigned_abs() as u32);
    if scale >= 0 {
        BigRational::from_integer(digits * power)
    } else {
        BigRational::new(digits, power)
    }
}

fn nearest(q: &BigRational) -> Option<f64> {
    q.to_f64().filter(|x| x.is_finite())
}

/// `a op b` for the arithmetic operators; `None` on division by zero or
/// overflow.
pub(crate) fn arith(op: BinaryOp, a: f64, b: f64) -> Option<f64> {
    let (x, y) = (decimal(a), decimal(b));
    let q = match op {
        BinaryOp::Add => x + y,
        BinaryOp::Sub => x - y,
        BinaryOp::Mul => x * y,
        BinaryOp::Div if y.is_zero() => return None,
        BinaryOp::Div => x / y,
        _ => unreachable!("not arithmetic: {op:?}"),
    };
    nearest(&q)
}

/// `(cur - prev) / prev`, rounded once.
pub(crate) fn relative_change(cur: f64, prev: f64) -> Option<f64> {
    let prev = decimal(prev);
    if prev.is_zero() {
        return None;
    }
    nearest(&((decimal(cur) - &prev) / prev))
}
