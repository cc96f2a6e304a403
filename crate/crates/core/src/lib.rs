//! GQM+Strategies models: parsing, validation, evaluation and rendering.

pub mod data;
pub mod diagnostic;
pub mod eval;
pub mod expr;
pub mod model;
pub mod patterns;
pub mod report;
pub mod span;
pub mod syntax;

pub use data::{Dataset, IngestError};
pub use diagnostic::{Diagnostic, Severity};
pub use eval::{evaluate, evaluate_series, explain, EvaluationReport};
pub use model::Model;
pub use span::SourceSpan;
pub use syntax::{format_model, parse_model, ParseError};
