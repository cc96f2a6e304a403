//! Generated datasets over a small fixed schema.

use gqms::data::{Dataset, Scalar};
use gqms::model::Model;
use gqms::syntax::parse_model;
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::sample::select;

pub fn data_model() -> Model {
    parse_model("metric P: number\nmetric Q: number\nmetric ok: boolean", "d.gqms").unwrap()
}

pub fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        (-1000i32..1000).prop_map(f64::from),
        (0u32..100_000).prop_map(|n| f64::from(n) / 100.0),
    ]
}

pub fn observation() -> impl Strategy<Value = (String, u32, Scalar)> {
    prop_oneof![
        (select(vec!["P", "Q"]), 0u32..30, finite()).prop_map(|(m, p, v)| (m.to_string(), p, Scalar::Number(v))),
        (0u32..30, any::<bool>()).prop_map(|(p, b)| ("ok".to_string(), p, Scalar::Bool(b))),
    ]
}

pub fn dataset() -> impl Strategy<Value = Dataset> {
    vec(observation(), 0..40).prop_map(|rows| {
        let mut ds = Dataset::new();
        for (m, p, v) in rows {
            let _ = ds.insert(m, p, v);
        }
        ds
    })
}

/// Two conflict-free datasets drawn from one source, possibly overlapping.
pub fn compatible_pair() -> impl Strategy<Value = (Dataset, Dataset, Dataset)> {
    (dataset(), vec(0u8..4, 40)).prop_map(|(ds, picks)| {
        let mut parts = (Dataset::new(), Dataset::new(), Dataset::new());
        for (o, pick) in ds.iter().zip(picks.iter().cycle()) {
            match pick {
                0 => parts.0.insert(o.metric, o.period, o.value).unwrap(),
                1 => parts.1.insert(o.metric, o.period, o.value).unwrap(),
                2 => parts.2.insert(o.metric, o.period, o.value).unwrap(),
                _ => {
                    parts.0.insert(o.metric.clone(), o.period, o.value).unwrap();
                    parts.1.insert(o.metric, o.period, o.value).unwrap();
                }
            }
        }
        parts
    })
}
