//! Core data model: documents, conditions, valuations and diagnostics.
//!
//! Every value here is immutable once built; a [`CatDocument`] can only be
//! obtained through validation, so downstream passes may assume its
//! structural invariants.

mod condition;
mod diagnostic;
mod document;
mod valuation;
mod value;

pub use condition::{check_clause, joint_witness, Clause, Condition, Domain, Guard, GuardAtom, InputKind, KindError, Literal};
pub use diagnostic::{has_errors, Diagnostic, DiagnosticRecord, Severity, Span};
pub use document::{
    behavior_set, table_stats, Alias, CatDocument, Cell, DocumentParts, ElementId, InputDecl, OutputRow, Refinement,
    SourceMap, SubRow, SubRowRef, TableStats, Target, TransitionRef, TransitionRule, EXIT_TOKEN,
};
pub use valuation::Valuation;
pub use value::{Axis, CmpOp, Decimal, Value, Vec3, MAX_DIGITS};
