//! Recorded measurement observations.
//!
//! Periods are abstract indices (`0, 1, 2, ...`); what one step means is up to
//! each metric's `period` label. Sparse and out-of-order periods are fine, a
//! gap simply reads as missing.

mod ingest;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use crate::expr::Scalar;
pub use ingest::{ingest_csv, ingest_jsonl, IngestError};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observation {
    pub metric: String,
    pub period: u32,
    pub value: Scalar,
}

/// At most one value per (metric, period). Absent pairs read as missing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    observations: BTreeMap<(String, u32), Scalar>,
}

impl Dataset {
    pub fn new() -> Self {
        Dataset::default()
    }

    pub fn get(&self, metric: &str, period: u32) -> Option<Scalar> {
        // BTreeMap<(String, u32), _> cannot be queried by (&str, u32) without
        // allocating; the range trick avoids the key clone.
        self.observations
            .range((metric.to_string(), period)..=(metric.to_string(), period))
            .next()
            .map(|(_, v)| *v)
    }

    /// Adds an observation; if the pair is already present, returns the
    /// existing value and leaves the dataset unchanged.
    pub fn insert(&mut self, metric: impl Into<String>, period: u32, value: Scalar) -> Result<(), Scalar> {
        use std::collections::btree_map::Entry;
        match self.observations.entry((metric.into(), period)) {
            Entry::Occupied(e) => Err(*e.get()),
            Entry::Vacant(e) => {
                e.insert(value);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Highest period with any observation.
    pub fn max_period(&self) -> Option<u32> {
        self.observations.keys().map(|(_, p)| *p).max()
    }

    /// Observations ordered by metric, then period.
    pub fn iter(&self) -> impl Iterator<Item = Observation> + '_ {
        self.observations.iter().map(|((metric, period), value)| Observation {
            metric: metric.clone(),
            period: *period,
            value: *value,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,period,value\n");
        for o in self.iter() {
            out.push_str(&format!("{},{},{}\n", o.metric, o.period, o.value));
        }
        out
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for o in self.iter() {
            out.push_str(&serde_json::to_string(&o).expect("observations serialize"));
            out.push('\n');
        }
        out
    }
}

impl FromIterator<Observation> for Dataset {
    /// Later duplicates of a (metric, period) pair are dropped.
    fn from_iter<I: IntoIterator<Item = Observation>>(iter: I) -> Self {
        let mut ds = Dataset::new();
        for o in iter {
            let _ = ds.insert(o.metric, o.period, o.value);
        }
        ds
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("conflicting values for {metric}[{period}]: {left} vs {right}")]
pub struct MergeConflict {
    pub metric: String,
    pub period: u32,
    pub left: Scalar,
    pub right: Scalar,
}

/// Union of two datasets. Pairs present in both must carry equal values.
pub fn merge(a: &Dataset, b: &Dataset) -> Result<Dataset, Vec<MergeConflict>> {
    let mut out = a.clone();
    let mut conflicts = Vec::new();
    for o in b.iter() {
        if let Err(existing) = out.insert(o.metric.clone(), o.period, o.value) {
            if existing != o.value {
                conflicts.push(MergeConflict {
                    metric: o.metric,
                    period: o.period,
                    left: existing,
                    right: o.value,
                });
            }
        }
    }
    if conflicts.is_empty() {
        Ok(out)
    } else {
        Err(conflicts)
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(rows: &[(&str, u32, f64)]) -> Dataset {
        rows.iter()
            .map(|(m, p, v)| Observation {
                metric: m.to_string(),
                period: *p,
                value: Scalar::Number(*v),
            })
            .collect()
    }

    #[test]
    fn merge_identity() {
        let d = ds(&[("P", 1, 100.0)]);
        assert_eq!(merge(&d, &Dataset::new()).unwrap(), d);
        assert_eq!(merge(&Dataset::new(), &d).unwrap(), d);
    }

    #[test]
    fn merge_union() {
        let merged = merge(&ds(&[("P", 1, 100.0)]), &ds(&[("P", 2, 116.0)])).unwrap();
        assert_eq!(merged, ds(&[("P", 1, 100.0), ("P", 2, 116.0)]));
    }

    #[test]
    fn merge_conflict() {
        let err = merge(&ds(&[("P", 1, 100.0)]), &ds(&[("P", 1, 99.0)])).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!((err[0].metric.as_str(), err[0].period), ("P", 1));
        assert_eq!(err[0].to_string(), "conflicting values for P[1]: 100 vs 99");
    }

    #[test]
    fn identical_duplicates_merge() {
        let d = ds(&[("P", 1, 100.0)]);
        assert_eq!(merge(&d, &d).unwrap(), d);
    }

    #[test]
    fn lookups() {
        let d = ds(&[("P", 3, 1.0), ("Q", 0, 2.0)]);
        assert_eq!(d.get("P", 3), Some(Scalar::Number(1.0)));
        assert_eq!(d.get("P", 2), None);
        assert_eq!(d.get("R", 0), None);
        assert_eq!(d.max_period(), Some(3));
        assert_eq!(Dataset::new().max_period(), None);
    }
}
