#![allow(dead_code)]

pub mod datagen;
pub mod gen;
pub mod modelgen;
pub mod mutations;
pub mod reference;

use gqms::data::{Dataset, Scalar};
use gqms::model::Model;
use gqms::syntax::parse_model;

pub const ABC: &str = include_str!("../../examples/abc.gqms");
pub const ABC_CSV: &str = include_str!("../../examples/abc.csv");

pub fn abc() -> Model {
    parse_model(ABC, "abc.gqms").expect("golden model parses")
}

pub fn golden_data() -> Dataset {
    gqms::data::ingest_csv(ABC_CSV, &abc()).expect("golden data ingests")
}

pub fn num(v: f64) -> Scalar {
    Scalar::Number(v)
}

/// The golden dataset with `changes` applied; `None` removes the observation.
pub fn golden_with(changes: &[(&str, u32, Option<Scalar>)]) -> Dataset {
    let mut rows: Vec<(String, u32, Scalar)> = golden_data().iter().map(|o| (o.metric, o.period, o.value)).collect();
    for (metric, period, value) in changes {
        rows.retain(|(m, p, _)| !(m == metric && p == period));
        if let Some(v) = value {
            rows.push((metric.to_string(), *period, *v));
        }
    }
    let mut ds = Dataset::new();
    for (m, p, v) in rows {
        ds.insert(m, p, v).unwrap();
    }
    ds
}

/// Replaces the first occurrence of `from` in the golden source.
pub fn abc_edit(from: &str, to: &str) -> String {
    assert!(ABC.contains(from), "golden model has no {from:?}");
    ABC.replacen(from, to, 1)
}
