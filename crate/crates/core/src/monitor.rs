//! Offline replay of robot logs against a table hierarchy, and baseline test
//! derivation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::ProbeGrid;
use crate::diagnose::{diagnose, CatHierarchy, Diagnosis};
use crate::logic::{evaluate, evaluate_unchecked, EvalOutcome};
use crate::model::{CatDocument, SubRowRef, Valuation, Value};
use crate::CatError;

/// One log line: `{"t": .., "inputs": {..}, "outputs": [..], "behavior": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub inputs: BTreeMap<String, Value>,
    #[serde(rename = "outputs", default)]
    pub observed_outputs: Vec<String>,
    #[serde(rename = "behavior", default, skip_serializing_if = "Option::is_none")]
    pub observed_behavior: Option<String>,
}

/// Parses JSON Lines; blank lines are skipped.
pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>, CatError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| CatError::MalformedTrace { line: i + 1, message: e.to_string() })
        })
        .collect()
}

pub fn write_trace(records: &[TraceRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("trace records serialize"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    MissingOutput,
    UnexpectedOutput,
    UndefinedResponse,
    IllegalTransition,
}

impl ViolationKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationKind::MissingOutput => "missing-output",
            ViolationKind::UnexpectedOutput => "unexpected-output",
            ViolationKind::UndefinedResponse => "undefined-response",
            ViolationKind::IllegalTransition => "illegal-transition",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationEvent {
    pub t: f64,
    pub kind: ViolationKind,
    pub behavior: String,
    pub detail: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnosis: Option<Diagnosis>,
}

fn mismatch(t: f64, detail: String) -> CatError {
    CatError::SchemaMismatch { t, detail }
}

/// Checks a record's inputs against the root's declarations. Inputs the
/// root does not declare must belong to some document of the hierarchy.
fn check_schema(h: &CatHierarchy, doc: &CatDocument, record: &TraceRecord) -> Result<(), CatError> {
    let t = record.t;
    for decl in doc.inputs() {
        let value = record
            .inputs
            .get(&decl.name)
            .ok_or_else(|| mismatch(t, format!("input `{}` is missing", decl.name)))?;
        match decl.kind.admits(value) {
            Ok(()) => {}
            Err(true) => return Err(mismatch(t, format!("value {value} for `{}` is outside its domain", decl.name))),
            Err(false) => {
                return Err(mismatch(t, format!("value {value} for `{}` is not a {}", decl.name, decl.kind.name())))
            }
        }
    }
    for name in record.inputs.keys() {
        if doc.input(name).is_none() && !h.documents().any(|d| d.input(name).is_some()) {
            return Err(mismatch(t, format!("input `{name}` is not declared in any document")));
        }
    }
    if let Some(b) = &record.observed_behavior {
        if !doc.has_behavior(b) {
            return Err(mismatch(t, format!("behavior `{b}` does not appear in `{}`", doc.name())));
        }
    }
    Ok(())
}

/// Replays `trace` against the `root` document of `h`.
///
/// Each record is judged under its behavior: the logged one if present,
/// otherwise the one predicted from the previous record.
pub fn replay(h: &CatHierarchy, root: &str, trace: &[TraceRecord]) -> Result<Vec<ViolationEvent>, CatError> {
    let doc = h.document(root).ok_or_else(|| CatError::UnknownDocument(root.to_string()))?;
    if doc.refines().is_some() {
        return Err(CatError::Hierarchy(format!("`{root}` is not a level-0 document")));
    }
    let initial = doc
        .initial_behavior()
        .ok_or_else(|| CatError::Hierarchy(format!("`{root}` has no behaviors")))?
        .to_string();
    let mut events = Vec::new();
    let mut previous: Option<(f64, EvalOutcome)> = None;

    for record in trace {
        if !record.t.is_finite() {
            return Err(mismatch(record.t, "timestamp is not finite".to_string()));
        }
        if let Some((prev_t, _)) = &previous {
            if record.t < *prev_t {
                return Err(CatError::NonmonotoneTime { previous: *prev_t, t: record.t });
            }
        }
        check_schema(h, doc, record)?;

        let predicted = previous.as_ref().map(|(_, o)| o.next_behavior.clone());
        let behavior = match (&record.observed_behavior, &previous) {
            (Some(b), Some((_, prev))) => {
                if *b != prev.active_behavior {
                    let licensed = prev
                        .firing_transitions
                        .iter()
                        .filter_map(|t| doc.transition(*t))
                        .any(|rule| rule.target.name() == b);
                    if !licensed {
                        events.push(ViolationEvent {
                            t: record.t,
                            kind: ViolationKind::IllegalTransition,
                            behavior: b.clone(),
                            detail: format!("{} -> {b} with no firing transition", prev.active_behavior),
                            diagnosis: None,
                        });
                    }
                }
                b.clone()
            }
            (Some(b), None) => b.clone(),
            (None, _) => predicted.unwrap_or_else(|| initial.clone()),
        };

        let v = Valuation { values: record.inputs.clone(), active_behavior: behavior.clone() };
        let outcome = evaluate_unchecked(doc, &v);
        for output in &outcome.expected_outputs {
            if !record.observed_outputs.contains(output) {
                events.push(ViolationEvent {
                    t: record.t,
                    kind: ViolationKind::MissingOutput,
                    behavior: behavior.clone(),
                    detail: format!("`{output}` expected under {behavior} but not observed"),
                    diagnosis: diagnose(h, root, output, &v).ok(),
                });
            }
        }
        for output in &record.observed_outputs {
            if !outcome.expected_outputs.contains(output) {
                events.push(ViolationEvent {
                    t: record.t,
                    kind: ViolationKind::UnexpectedOutput,
                    behavior: behavior.clone(),
                    detail: format!("`{output}` observed but no {behavior} sub-row fires it"),
                    diagnosis: None,
                });
            }
        }
        if outcome.undefined_response {
            events.push(ViolationEvent {
                t: record.t,
                kind: ViolationKind::UndefinedResponse,
                behavior: behavior.clone(),
                detail: format!("no output and no transition is defined under {behavior}"),
                diagnosis: None,
            });
        }
        previous = Some((record.t, outcome));
    }
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineTest {
    pub behavior: String,
    /// The sub-row this test certifies.
    pub output: String,
    pub subrow: SubRowRef,
    pub valuation: Valuation,
    pub expected_outputs: Vec<String>,
    /// Outputs whose rows have no sub-row for this behavior.
    pub forbidden_outputs: Vec<String>,
}

/// One test per sub-row, grouped by behavior: the first probe-grid point
/// that fires the sub-row, with everything it fires expected.
pub fn derive_baseline_tests(doc: &CatDocument) -> Result<Vec<BaselineTest>, CatError> {
    let grid = ProbeGrid::new(doc)?;
    let mut tests = Vec::new();
    for behavior in doc.behaviors() {
        let forbidden: Vec<String> = doc
            .rows()
            .iter()
            .filter(|r| r.subrows.iter().all(|s| s.behavior != behavior))
            .map(|r| r.output.clone())
            .collect();
        for (at, output, sub) in doc.subrows().filter(|(_, _, s)| s.behavior == behavior) {
            let found = grid.iter().find_map(|values| {
                let v = Valuation { values, active_behavior: behavior.to_string() };
                let outcome = evaluate_unchecked(doc, &v);
                outcome.fired_subrows.contains(&at).then_some((v, outcome))
            });
            let Some((valuation, outcome)) = found else {
                return Err(CatError::UnsatisfiableSubrow {
                    behavior: sub.behavior.clone(),
                    output: output.to_string(),
                });
            };
            tests.push(BaselineTest {
                behavior: behavior.to_string(),
                output: output.to_string(),
                subrow: at,
                valuation,
                expected_outputs: outcome.expected_outputs,
                forbidden_outputs: forbidden.clone(),
            });
        }
    }
    Ok(tests)
}

/// Runs a baseline test: the expected outputs must fire and none of the
/// forbidden ones may.
pub fn run_baseline_test(doc: &CatDocument, test: &BaselineTest) -> Result<bool, CatError> {
    let outcome = evaluate(doc, &test.valuation)?;
    Ok(test.expected_outputs.iter().all(|o| outcome.expected_outputs.contains(o))
        && test.forbidden_outputs.iter().all(|o| !outcome.expected_outputs.contains(o)))
}
