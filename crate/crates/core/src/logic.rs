//! Sub-rows as implications, and evaluation of a document against a snapshot.
//!
//! Cells of one sub-row are conjoined; sub-rows sharing an output are
//! alternatives. Only sub-rows of the active behavior are consulted.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{CatDocument, Condition, ElementId, Span, SubRowRef, TransitionRef, Valuation};
use crate::CatError;

/// One antecedent atom: a cell's condition bound to its input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub input: String,
    pub condition: Condition,
}

/// `behavior: atom_1 ∧ … ∧ atom_n ⟹ consequent` for one sub-row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Implication {
    pub behavior: String,
    /// Ordered by the document's column order.
    pub antecedent: Vec<Atom>,
    pub consequent: String,
    pub origin: SubRowRef,
    pub span: Span,
}

impl Implication {
    /// True when every antecedent atom holds. Missing values fail their atom.
    pub fn antecedent_holds(&self, valuation: &Valuation) -> bool {
        self.antecedent
            .iter()
            .all(|a| valuation.get(&a.input).is_some_and(|v| a.condition.holds(v)))
    }
}

pub fn compile(doc: &CatDocument) -> Vec<Implication> {
    doc.subrows()
        .map(|(at, output, sub)| Implication {
            behavior: sub.behavior.clone(),
            antecedent: sub
                .cells
                .iter()
                .map(|c| Atom { input: c.input.clone(), condition: c.condition.clone() })
                .collect(),
            consequent: output.to_string(),
            origin: at,
            span: doc.span(&ElementId::SubRow(at)),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub active_behavior: String,
    /// Outputs with a firing sub-row, in row order.
    pub expected_outputs: Vec<String>,
    pub fired_subrows: Vec<SubRowRef>,
    /// Target of the first firing rule, or the active behavior. A refining
    /// document's `^exit` appears verbatim.
    pub next_behavior: String,
    /// Every firing rule in priority order.
    pub firing_transitions: Vec<TransitionRef>,
    pub undefined_response: bool,
    /// All firing rules, present when they disagree on the target.
    pub nondeterministic_transition: Option<Vec<TransitionRef>>,
}

impl EvalOutcome {
    pub fn transitioned(&self) -> bool {
        self.next_behavior != self.active_behavior
    }
}

pub fn evaluate(doc: &CatDocument, v: &Valuation) -> Result<EvalOutcome, CatError> {
    if !doc.has_behavior(&v.active_behavior) {
        return Err(CatError::UnknownBehavior(v.active_behavior.clone()));
    }
    doc.check_valuation(v)?;
    Ok(evaluate_unchecked(doc, v))
}

/// Evaluation without the totality and domain checks on `v`.
pub(crate) fn evaluate_unchecked(doc: &CatDocument, v: &Valuation) -> EvalOutcome {
    let lookup = |name: &str| v.get(name).cloned();
    let mut expected_outputs: Vec<String> = Vec::new();
    let mut fired_subrows = Vec::new();
    let mut firing_transitions = Vec::new();
    for (at, output, sub) in doc.subrows() {
        if sub.behavior != v.active_behavior {
            continue;
        }
        let fires = sub
            .cells
            .iter()
            .all(|c| v.get(&c.input).is_some_and(|x| c.condition.holds(x)));
        if fires {
            fired_subrows.push(at);
            if expected_outputs.last().map(String::as_str) != Some(output) {
                expected_outputs.push(output.to_string());
            }
        }
        for (k, rule) in sub.transitions.iter().enumerate() {
            if rule.guard.eval(&lookup) {
                firing_transitions.push(TransitionRef { row: at.row, sub: at.sub, rule: k });
            }
        }
    }
    let targets: BTreeSet<&str> = firing_transitions
        .iter()
        .filter_map(|t| doc.transition(*t))
        .map(|r| r.target.name())
        .collect();
    let next_behavior = firing_transitions
        .first()
        .and_then(|t| doc.transition(*t))
        .map_or_else(|| v.active_behavior.clone(), |r| r.target.name().to_string());
    let undefined_response = expected_outputs.is_empty() && next_behavior == v.active_behavior;
    let nondeterministic_transition = (targets.len() >= 2).then(|| firing_transitions.clone());
    EvalOutcome {
        active_behavior: v.active_behavior.clone(),
        expected_outputs,
        fired_subrows,
        next_behavior,
        firing_transitions,
        undefined_response,
        nondeterministic_transition,
    }
}

/// Advances the active behavior by one evaluation step.
pub fn trace_step(doc: &CatDocument, v: &Valuation) -> Result<Valuation, CatError> {
    let outcome = evaluate(doc, v)?;
    Ok(v.with_behavior(outcome.next_behavior))
}
