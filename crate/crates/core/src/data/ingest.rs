use std::collections::HashMap;

use serde::Deserialize;
use thiserror::Error;

use crate::data::{Dataset, Scalar};
use crate::model::{MetricKind, Model};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct IngestError {
    pub line: usize,
    pub message: String,
}

impl IngestError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        IngestError {
            line,
            message: message.into(),
        }
    }
}

/// Validation shared by both front ends.
struct Collector<'m> {
    kinds: HashMap<&'m str, MetricKind>,
    dataset: Dataset,
    errors: Vec<IngestError>,
}

impl<'m> Collector<'m> {
    fn new(model: &'m Model) -> Self {
        Collector {
            kinds: model.metric_kinds(),
            dataset: Dataset::new(),
            errors: Vec::new(),
        }
    }

    fn error(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(IngestError::new(line, message));
    }

    fn accept(&mut self, line: usize, metric: &str, period: u32, value: Scalar) {
        let Some(kind) = self.kinds.get(metric).copied() else {
            self.error(line, format!("unknown metric `{metric}`"));
            return;
        };
        let matches = matches!(
            (kind, value),
            (MetricKind::Number, Scalar::Number(_)) | (MetricKind::Boolean, Scalar::Bool(_))
        );
        if !matches {
            self.error(
                line,
                format!("kind mismatch: metric `{metric}` is {kind}, found `{value}`"),
            );
            return;
        }
        if let Scalar::Number(n) = value {
            if !n.is_finite() {
                self.error(line, format!("value for `{metric}` is not a finite number"));
                return;
            }
        }
        if self.dataset.insert(metric, period, value).is_err() {
            self.error(line, format!("duplicate observation for {metric}[{period}]"));
        }
    }

    fn finish(self) -> Result<Dataset, Vec<IngestError>> {
        if self.errors.is_empty() {
            Ok(self.dataset)
        } else {
            Err(self.errors)
        }
    }
}

fn parse_scalar(text: &str) -> Option<Scalar> {
    if text.eq_ignore_ascii_case("true") {
        return Some(Scalar::Bool(true));
    }
    if text.eq_ignore_ascii_case("false") {
        return Some(Scalar::Bool(false));
    }
    text.parse::<f64>().ok().filter(|n| n.is_finite()).map(Scalar::Number)
}

/// Reads `metric,period,value` rows. Every row is checked against the
/// model's metric declarations; any error means no dataset.
pub fn ingest_csv(text: &str, model: &Model) -> Result<Dataset, Vec<IngestError>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut collector = Collector::new(model);
    let mut records = reader.records();

    match records.next() {
        None => return Err(vec![IngestError::new(1, "missing header `metric,period,value`")]),
        Some(Err(e)) => return Err(vec![IngestError::new(1, e.to_string())]),
        Some(Ok(header)) => {
            if header.iter().collect::<Vec<_>>() != ["metric", "period", "value"] {
                let found = header.iter().collect::<Vec<_>>().join(",");
                return Err(vec![IngestError::new(
                    1,
                    format!("expected header `metric,period,value`, found `{found}`"),
                )]);
            }
        }
    }

    for record in records {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                collector.error(line, e.to_string());
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            collector.error(line, format!("expected 3 fields, found {}", record.len()));
            continue;
        }
        let period = match record[1].parse::<u32>() {
            Ok(p) => p,
            Err(_) => {
                collector.error(line, format!("period `{}` is not a non-negative integer", &record[1]));
                continue;
            }
        };
        let Some(value) = parse_scalar(&record[2]) else {
            collector.error(
                line,
                format!("value `{}` is neither a number nor a boolean", &record[2]),
            );
            continue;
        };
        collector.accept(line, &record[0], period, value);
    }
    collector.finish()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonValue {
    Bool(bool),
    Number(f64),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonRow {
    metric: String,
    period: u32,
    value: JsonValue,
}

/// Reads one `{"metric": .., "period": .., "value": ..}` object per line,
/// with the same checks as [`ingest_csv`]. Blank lines are ignored.
pub fn ingest_jsonl(text: &str, model: &Model) -> Result<Dataset, Vec<IngestError>> {
    let mut collector = Collector::new(model);
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonRow>(line) {
            Ok(row) => {
                let value = match row.value {
                    JsonValue::Bool(b) => Scalar::Bool(b),
                    JsonValue::Number(n) => Scalar::Number(n),
                };
                collector.accept(line_no, &row.metric, row.period, value);
            }
            Err(e) => {
                let message = e.to_string();
                // serde_json appends its own "at line 1 column N"; the line is ours.
                let message = message.split(" at line ").next().unwrap_or(&message).to_string();
                collector.error(line_no, message);
            }
        }
    }
    collector.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_model;

    fn model() -> Model {
        parse_model("metric P: number\nmetric ok: boolean", "m.gqms").unwrap()
    }

    #[test]
    fn csv_rows() {
        let ds = ingest_csv("metric,period,value\nP,1,100\nP,2,116", &model()).unwrap();
        assert_eq!(ds.get("P", 1), Some(Scalar::Number(100.0)));
        assert_eq!(ds.get("P", 2), Some(Scalar::Number(116.0)));
        assert_eq!(ds.len(), 2);
    }

    #[test]
    fn csv_header_only_and_crlf() {
        assert!(ingest_csv("metric,period,value\n", &model()).unwrap().is_empty());
        let ds = ingest_csv("metric,period,value\r\nok,0,TRUE\r\nok,1,False\r\n", &model()).unwrap();
        assert_eq!(ds.get("ok", 0), Some(Scalar::Bool(true)));
        assert_eq!(ds.get("ok", 1), Some(Scalar::Bool(false)));
    }

    #[test]
    fn csv_kind_mismatch_names_line() {
        let errs = ingest_csv("metric,period,value\nP,1,100\nP,2,true", &model()).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        let text = errs[0].to_string();
        assert!(text.contains("kind mismatch") && text.contains("line 3"), "{text}");
    }

    #[test]
    fn csv_row_errors_are_all_reported() {
        let text = "metric,period,value\nX,1,1\nP,-1,1\nP,1,abc\nP,1,1\nP,1,2\nP,2\nP,3,inf";
        let errs = ingest_csv(text, &model()).unwrap_err();
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![2, 3, 4, 6, 7, 8]);
        assert!(errs[3].message.contains("duplicate"));
    }

    #[test]
    fn csv_bad_header() {
        let errs = ingest_csv("period,metric,value\n", &model()).unwrap_err();
        assert_eq!(errs[0].line, 1);
        assert!(ingest_csv("", &model()).is_err());
    }

    #[test]
    fn jsonl_rows() {
        let ds = ingest_jsonl(r#"{"metric":"P","period":2,"value":116}"#, &model()).unwrap();
        assert_eq!(ds.get("P", 2), Some(Scalar::Number(116.0)));
        assert!(ingest_jsonl("", &model()).unwrap().is_empty());
    }

    #[test]
    fn jsonl_missing_key_names_line() {
        let text = "{\"metric\":\"P\",\"period\":1,\"value\":1}\n\n{\"metric\":\"P\",\"value\":116}";
        let errs = ingest_jsonl(text, &model()).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        assert!(errs[0].message.contains("period"), "{}", errs[0]);
    }

    #[test]
    fn jsonl_rejects_extra_keys_and_bad_types() {
        let text = "{\"metric\":\"P\",\"period\":1,\"value\":1,\"x\":0}\n{\"metric\":\"P\",\"period\":1.5,\"value\":1}\n{\"metric\":\"ok\",\"period\":1,\"value\":1}";
        let errs = ingest_jsonl(text, &model()).unwrap_err();
        assert_eq!(errs.iter().map(|e| e.line).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn front_ends_agree() {
        let csv = ingest_csv("metric,period,value\nP,1,100\nok,1,true", &model()).unwrap();
        let jsonl = ingest_jsonl(
            "{\"metric\":\"P\",\"period\":1,\"value\":100}\n{\"metric\":\"ok\",\"period\":1,\"value\":true}",
            &model(),
        )
        .unwrap();
        assert_eq!(csv, jsonl);
        assert_eq!(ingest_csv(&csv.to_csv(), &model()).unwrap(), csv);
        assert_eq!(ingest_jsonl(&csv.to_jsonl(), &model()).unwrap(), csv);
    }
}
