use std::fmt;

use serde::Serialize;

/// Verdict of an interpretation model for one goal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum GoalStatus {
    Satisfied,
    NotSatisfied,
    Undetermined,
}

impl GoalStatus {
    pub const ALL: [GoalStatus; 3] = [
        GoalStatus::Satisfied,
        GoalStatus::NotSatisfied,
        GoalStatus::Undetermined,
    ];

    /// Spelling inside expressions.
    pub fn keyword(self) -> &'static str {
        match self {
            GoalStatus::Satisfied => "satisfied",
            GoalStatus::NotSatisfied => "not_satisfied",
            GoalStatus::Undetermined => "undetermined",
        }
    }

    pub fn from_keyword(word: &str) -> Option<GoalStatus> {
        GoalStatus::ALL.into_iter().find(|s| s.keyword() == word)
    }

    /// true/false/unknown → Satisfied/NotSatisfied/Undetermined.
    pub fn from_value(value: &Value) -> GoalStatus {
        match value {
            Value::Bool(true) => GoalStatus::Satisfied,
            Value::Bool(false) => GoalStatus::NotSatisfied,
            _ => GoalStatus::Undetermined,
        }
    }

    pub fn glyph(self) -> char {
        match self {
            GoalStatus::Satisfied => '✓',
            GoalStatus::NotSatisfied => '✗',
            GoalStatus::Undetermined => '?',
        }
    }
}

impl fmt::Display for GoalStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GoalStatus::Satisfied => "Satisfied",
            GoalStatus::NotSatisfied => "NotSatisfied",
            GoalStatus::Undetermined => "Undetermined",
        })
    }
}

/// A recorded measurement value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Number(f64),
    Bool(bool),
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Number(n) => write!(f, "{n}"),
            Scalar::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Result of evaluating an expression. `Unknown` stands for a value that
/// cannot be determined from the available data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Status(GoalStatus),
    Unknown,
}

impl Value {
    /// Wraps a number, mapping non-finite results to `Unknown`.
    pub fn number(n: f64) -> Value {
        if n.is_finite() {
            Value::Number(n)
        } else {
            Value::Unknown
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Value::Unknown)
    }
}

impl From<Scalar> for Value {
    fn from(s: Scalar) -> Value {
        match s {
            Scalar::Number(n) => Value::number(n),
            Scalar::Bool(b) => Value::Bool(b),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Status(s) => f.write_str(s.keyword()),
            Value::Unknown => f.write_str("unknown"),
        }
    }
}
