use thiserror::Error;

use crate::model::Diagnostic;

/// Failures of library operations. Document-level findings are reported as
/// [`Diagnostic`]s instead; this type covers bad arguments and broken
/// preconditions. Every variant has a stable short [`code`](CatError::code).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatError {
    #[error("behavior `{0}` does not appear in the document")]
    UnknownBehavior(String),
    #[error("output `{0}` does not appear in the hierarchy")]
    UnknownOutput(String),
    #[error("document `{0}` is not loaded")]
    UnknownDocument(String),
    #[error("input `{0}` has no value")]
    MissingValue(String),
    #[error("value {value} for `{input}` is outside its declared domain")]
    DomainViolation { input: String, value: String },
    #[error("value {value} for `{input}` is not a {expected}")]
    ValueKind { input: String, value: String, expected: String },
    #[error("document `{document}` uses inherited inputs that are not resolved: {}", inputs.join(", "))]
    UnresolvedInputs { document: String, inputs: Vec<String> },
    #[error("number input `{0}` has no declared domain")]
    UnboundedInput(String),
    #[error("input `{0}` is already declared")]
    DuplicateInput(String),
    #[error("bad refinement link: {0}")]
    BadLink(String),
    #[error("snapshot lacks values for `{document}` inputs: {}", inputs.join(", "))]
    MissingChildValues { document: String, inputs: Vec<String> },
    #[error("{0}")]
    Hierarchy(String),
    #[error("record at t={t}: {detail}")]
    SchemaMismatch { t: f64, detail: String },
    #[error("timestamp {t} follows {previous}")]
    NonmonotoneTime { previous: f64, t: f64 },
    #[error("trace line {line}: {message}")]
    MalformedTrace { line: usize, message: String },
    #[error("bad simulation script: {0}")]
    BadScript(String),
    #[error("no probe valuation fires the {behavior}/{output} sub-row")]
    UnsatisfiableSubrow { behavior: String, output: String },
    #[error("sub-row {row}.{sub} does not exist")]
    NoSuchSubrow { row: usize, sub: usize },
    #[error("invalid document ({} diagnostics)", .0.len())]
    InvalidDocument(Vec<Diagnostic>),
}

impl CatError {
    pub fn code(&self) -> &'static str {
        match self {
            CatError::UnknownBehavior(_) => "unknown-behavior",
            CatError::UnknownOutput(_) => "unknown-output",
            CatError::UnknownDocument(_) => "unknown-document",
            CatError::MissingValue(_) => "missing-value",
            CatError::DomainViolation { .. } => "domain-violation",
            CatError::ValueKind { .. } => "value-kind",
            CatError::UnresolvedInputs { .. } => "unresolved-input",
            CatError::UnboundedInput(_) => "unbounded-input",
            CatError::DuplicateInput(_) => "duplicate-input",
            CatError::BadLink(_) => "bad-link",
            CatError::MissingChildValues { .. } => "missing-child-values",
            CatError::Hierarchy(_) => "bad-hierarchy",
            CatError::SchemaMismatch { .. } => "schema-mismatch",
            CatError::NonmonotoneTime { .. } => "nonmonotone-time",
            CatError::MalformedTrace { .. } => "malformed-trace",
            CatError::BadScript(_) => "bad-script",
            CatError::UnsatisfiableSubrow { .. } => "unsatisfiable-subrow",
            CatError::NoSuchSubrow { .. } => "no-such-subrow",
            CatError::InvalidDocument(_) => "invalid-document",
        }
    }
}
