//! Static checks over documents: structural validation, undefined-response
//! search over a boundary-value grid, and refinement checks between a parent
//! table and a child that decomposes one of its behaviors.

mod coverage;
mod probes;
mod refinement;

use std::collections::{BTreeMap, BTreeSet};

pub use coverage::{coverage, CoverageReport, NondeterministicCase, UncoveredCase};
pub use probes::{GridIter, ProbeGrid};
pub use refinement::{check_refinement, RefinementReport};

use crate::model::{
    joint_witness, CatDocument, Diagnostic, DiagnosticRecord, ElementId, InputDecl, Target, TransitionRef,
};
use crate::CatError;

pub fn validate(doc: &CatDocument) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let behaviors: BTreeSet<&str> = doc.behaviors().into_iter().collect();
    let mut inbound: BTreeSet<&str> = BTreeSet::new();

    for (at, _, sub) in doc.subrows() {
        for (k, rule) in sub.transitions.iter().enumerate() {
            let span = doc.span(&ElementId::Transition(TransitionRef { row: at.row, sub: at.sub, rule: k }));
            if let Target::Behavior(b) = &rule.target {
                if !behaviors.contains(b.as_str()) {
                    out.push(Diagnostic::error(
                        "dangling-transition",
                        format!("transition target `{b}` is not the behavior of any sub-row"),
                        span,
                    ));
                }
                if *b != sub.behavior {
                    inbound.insert(b.as_str());
                }
            }
        }
    }

    let initial = doc.initial_behavior();
    for behavior in doc.behaviors() {
        if Some(behavior) != initial && !inbound.contains(behavior) {
            let first = doc
                .subrows()
                .find(|(_, _, s)| s.behavior == behavior)
                .map(|(at, _, _)| doc.span(&ElementId::SubRow(at)))
                .unwrap_or_default();
            out.push(Diagnostic::warning(
                "unreachable-behavior",
                format!("behavior `{behavior}` is not initial and no transition enters it"),
                first,
            ));
        }
    }

    for (r, row) in doc.rows().iter().enumerate() {
        for (s, sub) in row.subrows.iter().enumerate() {
            if let Some(earlier) = row.subrows[..s]
                .iter()
                .position(|o| o.behavior == sub.behavior && o.cells == sub.cells)
            {
                let here = crate::model::SubRowRef { row: r, sub: s };
                let there = crate::model::SubRowRef { row: r, sub: earlier };
                out.push(
                    Diagnostic::warning(
                        "duplicate-subrow",
                        format!("sub-row {}:{} repeats an earlier one", row.output, sub.behavior),
                        doc.span(&ElementId::SubRow(here)),
                    )
                    .with_related(doc.span(&ElementId::SubRow(there)), "first occurrence"),
                );
            }
        }
    }

    for (at, _, sub) in doc.subrows() {
        for cell in &sub.cells {
            let Some(decl) = doc.input(&cell.input) else { continue };
            if joint_witness(&decl.kind, &[&cell.condition]).is_none() {
                out.push(Diagnostic::warning(
                    "always-false-cell",
                    format!("`{} : {}` cannot hold for any {} value", cell.input, cell.condition, decl.kind),
                    doc.span(&ElementId::Cell(at, cell.input.clone())),
                ));
            }
        }
    }

    for (i, decl) in doc.inputs().iter().enumerate() {
        if !doc.subrows().any(|(_, _, s)| s.cell(&decl.name).is_some()) {
            out.push(Diagnostic::info(
                "unused-input",
                format!("input `{}` is blank in every sub-row", decl.name),
                doc.span(&ElementId::Input(i)),
            ));
        }
    }

    out.sort_by_key(|d| (d.span.start, d.severity));
    out
}

/// Appends a blank column; the original document is untouched.
pub fn add_input_column(doc: &CatDocument, decl: InputDecl) -> Result<CatDocument, CatError> {
    doc.with_input(decl)
}

/// The JSON diagnostic stream: one flat record per diagnostic.
pub fn diagnostic_records(file: &str, diagnostics: &[Diagnostic]) -> Vec<DiagnosticRecord> {
    diagnostics.iter().map(|d| d.record(file)).collect()
}

/// Count of each diagnostic code, for summaries.
pub fn code_histogram(diagnostics: &[Diagnostic]) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::new();
    for d in diagnostics {
        *out.entry(d.code.clone()).or_insert(0) += 1;
    }
    out
}
