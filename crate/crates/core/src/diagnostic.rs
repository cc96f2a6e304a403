//! Findings produced by model validation and conflict detection.

use std::fmt;

use serde::Serialize;

use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// Stable diagnostic codes. Scripts match on these, so never renumber or
/// rename an existing one.
pub mod codes {
    /// A required template field is absent or empty.
    pub const MISSING_FIELD: &str = "E_MISSING_FIELD";
    /// A level-1 goal has no business-goal type.
    pub const MISSING_TYPE: &str = "E_MISSING_TYPE";
    /// Two elements share an identifier.
    pub const DUPLICATE_ID: &str = "E_DUPLICATE_ID";
    /// A metric is declared twice with different kind, unit or period label.
    pub const METRIC_CONFLICT: &str = "E_METRIC_CONFLICT";
    /// A metric is declared twice identically.
    pub const DUPLICATE_METRIC: &str = "W_DUPLICATE_METRIC";
    /// A reference names nothing, or names an element of the wrong kind.
    pub const DANGLING_REF: &str = "E_DANGLING_REF";
    /// The goal/strategy derivation structure contains a cycle.
    pub const CYCLE: &str = "E_CYCLE";
    /// A goal's level disagrees with its position in the derivation forest.
    pub const LEVEL: &str = "E_LEVEL";
    /// More than one plan for the same goal/strategy pair.
    pub const DUPLICATE_PLAN: &str = "E_DUPLICATE_PLAN";
    /// A plan names a strategy that belongs to another goal.
    pub const PLAN_MISMATCH: &str = "E_PLAN_MISMATCH";
    /// An interpretation expression is ill-typed.
    pub const TYPE: &str = "E_TYPE";
    /// A `satisfied when` clause reads the status of a goal that is not a descendant.
    pub const STATUS_SCOPE: &str = "E_STATUS_SCOPE";
    /// A goal, or a goal/strategy pair, has no measurement plan.
    pub const NO_PLAN: &str = "W_NO_PLAN";
    /// The model declares no goals (strict mode only).
    pub const EMPTY: &str = "W_EMPTY";
    /// Declared competing goals, or opposing requirements on one metric.
    pub const CONFLICT: &str = "W_CONFLICT";
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub location: SourceSpan,
}

impl Diagnostic {
    pub fn error(code: &'static str, location: &SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code,
            message: message.into(),
            location: location.clone(),
        }
    }

    pub fn warning(code: &'static str, location: &SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code,
            message: message.into(),
            location: location.clone(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `severity code file:line:col message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.severity, self.code, self.location, self.message)
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}
