//! Seeded random expressions and environments for oracle tests.

use gqms::expr::{MapEnv, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::reference::{status_of, RefEnv, R};

pub const NUM_METRICS: [&str; 3] = ["n0", "n1", "n2"];
pub const BOOL_METRICS: [&str; 2] = ["b0", "b1"];
/// G4 never has a status in generated environments.
pub const GOALS: [&str; 4] = ["G1", "G2", "G3", "G4"];
const LITERALS: [f64; 9] = [0.0, 1.0, 2.0, 3.0, 0.5, 1.15, 10.0, 100.0, 0.05];
const VALUES: [f64; 8] = [0.0, 1.0, 2.0, 3.0, 5.0, 0.5, 100.0, 116.0];
const MAX_PERIOD: u32 = 4;

pub struct ExprGen {
    rng: ChaCha8Rng,
    pub missing_rate: f64,
    pub allow_defined: bool,
}

impl ExprGen {
    pub fn new(seed: u64) -> Self {
        ExprGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            missing_rate: 0.2,
            allow_defined: true,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn lag(&mut self) -> u32 {
        *[0, 0, 0, 1, 1, 2].choose(&mut self.rng).unwrap()
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(&mut self.rng).unwrap()
    }

    pub fn number(&mut self, depth: u32) -> R {
        if depth == 0 || self.rng.gen_bool(0.3) {
            return match self.rng.gen_range(0..3) {
                0 => R::Num(self.pick(&LITERALS)),
                1 => R::Pct(self.pick(&NUM_METRICS).to_string(), self.lag()),
                _ => R::Metric(self.pick(&NUM_METRICS).to_string(), self.lag()),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0 => R::Neg(Box::new(self.number(d))),
            1 => R::Abs(Box::new(self.number(d))),
            2 => R::Min(Box::new(self.number(d)), Box::new(self.number(d))),
            3 => R::Max(Box::new(self.number(d)), Box::new(self.number(d))),
            _ => {
                let op = self.pick(&['+', '-', '*', '/']);
                R::Arith(op, Box::new(self.number(d)), Box::new(self.number(d)))
            }
        }
    }

    pub fn status(&mut self) -> R {
        if self.rng.gen_bool(0.4) {
            R::Stat(self.rng.gen_range(0..3))
        } else {
            R::Status(self.pick(&GOALS).to_string())
        }
    }

    pub fn boolean(&mut self, depth: u32) -> R {
        if depth == 0 || self.rng.gen_bool(0.2) {
            return if self.rng.gen_bool(0.3) {
                R::Bool(self.rng.gen_bool(0.5))
            } else {
                R::Metric(self.pick(&BOOL_METRICS).to_string(), self.lag())
            };
        }
        let d = depth - 1;
        let choices = if self.allow_defined { 7 } else { 6 };
        match self.rng.gen_range(0..choices) {
            0 => R::Not(Box::new(self.boolean(d))),
            1 => R::And(Box::new(self.boolean(d)), Box::new(self.boolean(d))),
            2 => R::Or(Box::new(self.boolean(d)), Box::new(self.boolean(d))),
            3 | 4 => {
                let op = self.pick(&["<", "<=", ">", ">=", "=", "!="]);
                R::Cmp(op, Box::new(self.number(d)), Box::new(self.number(d)))
            }
            5 => {
                let op = self.pick(&["=", "!="]);
                R::Cmp(op, Box::new(self.status()), Box::new(self.status()))
            }
            _ => {
                let inner = match self.rng.gen_range(0..3) {
                    0 => self.number(d),
                    1 => self.boolean(d),
                    _ => self.status(),
                };
                R::Defined(Box::new(inner))
            }
        }
    }

    /// The same random environment in both representations.
    pub fn env(&mut self) -> (RefEnv, MapEnv) {
        let t = self.rng.gen_range(0..=MAX_PERIOD);
        let mut r = RefEnv { t, ..RefEnv::default() };
        let mut m = MapEnv::at(t);
        for p in 0..=MAX_PERIOD {
            for name in NUM_METRICS {
                if !self.rng.gen_bool(self.missing_rate) {
                    let v = self.pick(&VALUES);
                    r.numbers.insert((name.to_string(), p), v);
                    m = m.with_metric(name, p, Scalar::Number(v));
                }
            }
            for name in BOOL_METRICS {
                if !self.rng.gen_bool(self.missing_rate) {
                    let v = self.rng.gen_bool(0.5);
                    r.bools.insert((name.to_string(), p), v);
                    m = m.with_metric(name, p, Scalar::Bool(v));
                }
            }
        }
        for g in &GOALS[..3] {
            let s = self.rng.gen_range(0..3);
            r.statuses.insert(g.to_string(), s);
            m = m.with_status(g, status_of(s));
        }
        (r, m)
    }
}
