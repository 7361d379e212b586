use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{
    joint_witness, CatDocument, Diagnostic, ElementId, OutputRow, Span, SubRow, Target, TransitionRef,
};
use crate::CatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    /// Inputs the child takes from the parent, referenced or redeclared.
    pub inherited_inputs: Vec<String>,
    pub violations: Vec<Diagnostic>,
}

impl RefinementReport {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `child` is a usable decomposition of one `parent` behavior:
/// every input it uses is known, shared inputs keep their kinds, every parent
/// sub-row of the refined behavior is compatible with some child sub-row,
/// and child transitions stay inside the child or exit.
pub fn check_refinement(parent: &CatDocument, child: &CatDocument) -> Result<RefinementReport, CatError> {
    let link = child
        .refines()
        .ok_or_else(|| CatError::BadLink(format!("`{}` does not refine any document", child.name())))?;
    if link.document != parent.name() {
        return Err(CatError::BadLink(format!(
            "`{}` refines `{}`, not `{}`",
            child.name(),
            link.document,
            parent.name()
        )));
    }
    if !parent.has_behavior(&link.behavior) {
        return Err(CatError::BadLink(format!(
            "`{}` has no behavior `{}`",
            parent.name(),
            link.behavior
        )));
    }
    if !parent.is_resolved() {
        return Err(CatError::UnresolvedInputs {
            document: parent.name().to_string(),
            inputs: parent.inherited().to_vec(),
        });
    }

    let mut violations = Vec::new();
    let mut inherited = BTreeSet::new();
    for name in child.inherited() {
        if parent.input(name).is_some() {
            inherited.insert(name.clone());
        } else {
            violations.push(Diagnostic::error(
                "orphan-input",
                format!("`{name}` is declared neither in `{}` nor in `{}`", child.name(), parent.name()),
                child.first_reference(name),
            ));
        }
    }
    for (i, decl) in child.inputs().iter().enumerate() {
        let Some(theirs) = parent.input(&decl.name) else { continue };
        inherited.insert(decl.name.clone());
        if theirs.kind != decl.kind {
            violations.push(Diagnostic::error(
                "kind-drift",
                format!(
                    "`{}` is `{}` here but `{}` in `{}`",
                    decl.name,
                    decl.kind,
                    theirs.kind,
                    parent.name()
                ),
                child.span(&ElementId::Input(i)),
            ));
        }
    }

    violations.extend(open_transitions(child.rows(), |t| child.span(&ElementId::Transition(t))));

    if violations.is_empty() {
        let resolved = child.resolve(parent.inputs()).map_err(CatError::InvalidDocument)?;
        for (at, _, sub) in parent.subrows() {
            if sub.behavior != link.behavior {
                continue;
            }
            let compatible = resolved.subrows().any(|(_, _, c)| jointly_satisfiable(parent, &resolved, sub, c));
            if !compatible {
                violations.push(Diagnostic::error(
                    "vacuous-decomposition",
                    format!(
                        "no sub-row of `{}` can fire while `{}` sub-row {} of `{}` holds",
                        child.name(),
                        link.behavior,
                        parent.rows()[at.row].output,
                        parent.name()
                    ),
                    child.span(&ElementId::Refines),
                )
                .with_related(parent.span(&ElementId::SubRow(at)), "parent sub-row"),
                );
            }
        }
    }

    Ok(RefinementReport { inherited_inputs: inherited.into_iter().collect(), violations })
}

/// Whether some valuation satisfies every cell of both sub-rows. Inputs
/// are independent, so this is decided one input at a time.
fn jointly_satisfiable(parent: &CatDocument, child: &CatDocument, a: &SubRow, b: &SubRow) -> bool {
    let inputs: BTreeSet<&str> = a.cells.iter().chain(&b.cells).map(|c| c.input.as_str()).collect();
    inputs.into_iter().all(|name| {
        let Some(decl) = child.input(name).or_else(|| parent.input(name)) else { return false };
        let conditions: Vec<_> = [a.cell(name), b.cell(name)].into_iter().flatten().map(|c| &c.condition).collect();
        joint_witness(&decl.kind, &conditions).is_some()
    })
}

fn open_transitions(rows: &[OutputRow], span_of: impl Fn(TransitionRef) -> Span) -> Vec<Diagnostic> {
    let behaviors: BTreeSet<&str> = rows.iter().flat_map(|r| r.subrows.iter().map(|s| s.behavior.as_str())).collect();
    let mut out = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        for (s, sub) in row.subrows.iter().enumerate() {
            for (k, rule) in sub.transitions.iter().enumerate() {
                if let Target::Behavior(b) = &rule.target {
                    if !behaviors.contains(b.as_str()) {
                        out.push(Diagnostic::error(
                            "open-transition",
                            format!("transition leaves the child for `{b}`; use `^exit` to return to the parent"),
                            span_of(TransitionRef { row: r, sub: s, rule: k }),
                        ));
                    }
                }
            }
        }
    }
    out
}
