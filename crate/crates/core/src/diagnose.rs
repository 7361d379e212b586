//! Drill-down from an observed failure to the condition that explains it.
//!
//! Starting at a level-0 table, the sub-rows that promise the missing output
//! under the active behavior are checked against the snapshot. A false cell
//! is the answer; if the table says the output should have happened, the
//! search continues in the child table that refines the active behavior.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::logic::evaluate;
use crate::model::{CatDocument, ElementId, Span, SubRowRef, TransitionRef, Valuation, Value};
use crate::CatError;

/// A forest of documents linked by their `refines` headers. Documents are
/// stored with inherited inputs resolved against their parents.
#[derive(Debug, Clone)]
pub struct CatHierarchy {
    documents: BTreeMap<String, CatDocument>,
    /// Names in load order.
    order: Vec<String>,
    /// child → (parent document, parent behavior)
    links: BTreeMap<String, (String, String)>,
}

impl CatHierarchy {
    pub fn new(docs: Vec<CatDocument>) -> Result<Self, CatError> {
        let mut raw: BTreeMap<String, CatDocument> = BTreeMap::new();
        let mut order = Vec::new();
        for doc in docs {
            let name = doc.name().to_string();
            if raw.insert(name.clone(), doc).is_some() {
                return Err(CatError::Hierarchy(format!("document `{name}` is loaded twice")));
            }
            order.push(name);
        }

        let mut links = BTreeMap::new();
        let mut claimed: BTreeMap<(String, String), String> = BTreeMap::new();
        for name in &order {
            let doc = &raw[name];
            let Some(link) = doc.refines() else {
                if doc.level() != 0 {
                    return Err(CatError::Hierarchy(format!(
                        "`{name}` is at level {} but refines nothing",
                        doc.level()
                    )));
                }
                continue;
            };
            let parent = raw.get(&link.document).ok_or_else(|| {
                CatError::BadLink(format!("`{name}` refines `{}`, which is not loaded", link.document))
            })?;
            if !parent.has_behavior(&link.behavior) {
                return Err(CatError::BadLink(format!(
                    "`{name}` refines behavior `{}`, which `{}` does not have",
                    link.behavior, link.document
                )));
            }
            let key = (link.document.clone(), link.behavior.clone());
            if let Some(other) = claimed.insert(key, name.clone()) {
                return Err(CatError::Hierarchy(format!(
                    "`{other}` and `{name}` both refine `{}` behavior `{}`",
                    link.document, link.behavior
                )));
            }
            links.insert(name.clone(), (link.document.clone(), link.behavior.clone()));
        }

        // Walking up from every document must reach a root without revisiting.
        for name in &order {
            let mut seen = BTreeSet::new();
            let mut at = name.as_str();
            while let Some((parent, _)) = links.get(at) {
                if !seen.insert(at) {
                    return Err(CatError::Hierarchy(format!("refinement cycle through `{at}`")));
                }
                at = parent;
            }
            if raw[at].level() != 0 {
                return Err(CatError::Hierarchy(format!("the tree containing `{name}` has no level-0 root")));
            }
        }

        // Resolve parents before children.
        let mut documents: BTreeMap<String, CatDocument> = BTreeMap::new();
        let depth = |name: &str| {
            let mut d = 0;
            let mut at = name;
            while let Some((parent, _)) = links.get(at) {
                d += 1;
                at = parent;
            }
            d
        };
        let mut by_depth: Vec<&String> = order.iter().collect();
        by_depth.sort_by_key(|n| depth(n));
        for name in by_depth {
            let doc = &raw[name];
            let resolved = match links.get(name) {
                Some((parent, _)) => doc.resolve(documents[parent].inputs()).map_err(CatError::InvalidDocument)?,
                None if !doc.is_resolved() => {
                    return Err(CatError::UnresolvedInputs {
                        document: name.clone(),
                        inputs: doc.inherited().to_vec(),
                    })
                }
                None => doc.clone(),
            };
            documents.insert(name.clone(), resolved);
        }
        Ok(Self { documents, order, links })
    }

    pub fn document(&self, name: &str) -> Option<&CatDocument> {
        self.documents.get(name)
    }

    /// Documents in load order.
    pub fn documents(&self) -> impl Iterator<Item = &CatDocument> {
        self.order.iter().map(|n| &self.documents[n])
    }

    pub fn parent(&self, name: &str) -> Option<(&str, &str)> {
        self.links.get(name).map(|(d, b)| (d.as_str(), b.as_str()))
    }

    /// The document refining `behavior` of `document`, if loaded.
    pub fn child(&self, document: &str, behavior: &str) -> Option<&CatDocument> {
        self.links
            .iter()
            .find(|(_, (d, b))| d == document && b == behavior)
            .map(|(child, _)| &self.documents[child])
    }

    pub fn roots(&self) -> Vec<&CatDocument> {
        self.documents().filter(|d| d.refines().is_none()).collect()
    }

    /// `name` and every document below it, parents first.
    pub fn subtree(&self, name: &str) -> Vec<&CatDocument> {
        let mut out = Vec::new();
        let mut queue = vec![name.to_string()];
        while let Some(at) = queue.pop() {
            if let Some(doc) = self.documents.get(&at) {
                out.push(doc);
                for (child, (parent, _)) in &self.links {
                    if *parent == at {
                        queue.push(child.clone());
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BrokenCondition,
    TableIncomplete,
    ResolvedAtTop,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BrokenCondition => "broken-condition",
            Verdict::TableIncomplete => "table-incomplete",
            Verdict::ResolvedAtTop => "resolved-at-top",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStep {
    pub document: String,
    pub behavior: String,
}

/// A cell that is false under the snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailingAtom {
    pub input: String,
    pub required: String,
    pub actual: Value,
    /// The cell as it reads in the table, `input : condition`.
    pub cell: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Culprit {
    pub document: String,
    pub output: String,
    pub behavior: String,
    pub subrow: SubRowRef,
    pub span: Span,
    pub note: Option<String>,
    pub atoms: Vec<FailingAtom>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiredTransition {
    pub document: String,
    pub output: String,
    pub at: TransitionRef,
    pub target: String,
    pub guard: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub verdict: Verdict,
    pub path: Vec<PathStep>,
    pub culprit: Option<Culprit>,
    /// Other failing candidate sub-rows at the culprit's level.
    pub related: Vec<Culprit>,
    pub transition: Option<FiredTransition>,
    /// The outputs looked for at the last level visited.
    pub outputs: Vec<String>,
}

pub fn diagnose(h: &CatHierarchy, root: &str, violated_output: &str, v: &Valuation) -> Result<Diagnosis, CatError> {
    diagnose_with(h, root, violated_output, v, &BTreeMap::new())
}

/// As [`diagnose`], with the behavior to assume in each child document
/// (by document name). Children not listed start in their initial behavior.
pub fn diagnose_with(
    h: &CatHierarchy,
    root: &str,
    violated_output: &str,
    v: &Valuation,
    child_behaviors: &BTreeMap<String, String>,
) -> Result<Diagnosis, CatError> {
    let mut doc = h.document(root).ok_or_else(|| CatError::UnknownDocument(root.to_string()))?;
    if doc.level() != 0 || doc.refines().is_some() {
        return Err(CatError::Hierarchy(format!("`{root}` is not a level-0 document")));
    }
    if !h.subtree(root).iter().any(|d| d.has_output(violated_output)) {
        return Err(CatError::UnknownOutput(violated_output.to_string()));
    }
    if !doc.has_behavior(&v.active_behavior) {
        return Err(CatError::UnknownBehavior(v.active_behavior.clone()));
    }

    let mut behavior = v.active_behavior.clone();
    let mut wanted = vec![violated_output.to_string()];
    let mut path = Vec::new();
    loop {
        let snapshot = v.with_behavior(behavior.clone());
        if path.is_empty() {
            doc.check_valuation(&snapshot)?;
        } else {
            let missing: Vec<String> = doc
                .inputs()
                .iter()
                .filter(|d| snapshot.get(&d.name).is_none())
                .map(|d| d.name.clone())
                .collect();
            if !missing.is_empty() {
                return Err(CatError::MissingChildValues { document: doc.name().to_string(), inputs: missing });
            }
            doc.check_valuation(&snapshot)?;
        }
        path.push(PathStep { document: doc.name().to_string(), behavior: behavior.clone() });
        let finish = |verdict, culprit, related, transition, path, wanted| Diagnosis {
            verdict,
            path,
            culprit,
            related,
            transition,
            outputs: wanted,
        };

        if path.len() == 1 {
            let outcome = evaluate(doc, &snapshot)?;
            if let Some(&at) = outcome.firing_transitions.first() {
                let rule = doc.transition(at).expect("firing rule exists");
                let transition = FiredTransition {
                    document: doc.name().to_string(),
                    output: doc.rows()[at.row].output.clone(),
                    at,
                    target: rule.target.name().to_string(),
                    guard: rule.guard.to_string(),
                    span: doc.span(&ElementId::Transition(at)),
                };
                return Ok(finish(Verdict::ResolvedAtTop, None, Vec::new(), Some(transition), path, wanted));
            }
        }

        let mut candidates: Vec<Culprit> = doc
            .subrows()
            .filter(|(_, output, sub)| sub.behavior == behavior && wanted.iter().any(|w| w == output))
            .map(|(at, output, sub)| Culprit {
                document: doc.name().to_string(),
                output: output.to_string(),
                behavior: behavior.clone(),
                subrow: at,
                span: doc.span(&ElementId::SubRow(at)),
                note: sub.note.clone(),
                atoms: sub
                    .cells
                    .iter()
                    .filter_map(|cell| {
                        let actual = snapshot.get(&cell.input)?.clone();
                        (!cell.condition.holds(&actual)).then(|| FailingAtom {
                            input: cell.input.clone(),
                            required: cell.condition.to_string(),
                            actual,
                            cell: format!("{} : {}", cell.input, cell.condition),
                            span: doc.span(&ElementId::Cell(at, cell.input.clone())),
                        })
                    })
                    .collect(),
            })
            .collect();
        // stable sort keeps document order among equally good matches
        candidates.sort_by_key(|c| c.atoms.len());

        if let Some(best) = candidates.first() {
            if !best.atoms.is_empty() {
                let best = candidates.remove(0);
                return Ok(finish(Verdict::BrokenCondition, Some(best), candidates, None, path, wanted));
            }
        }

        let Some(child) = h.child(doc.name(), &behavior) else {
            return Ok(finish(Verdict::TableIncomplete, None, Vec::new(), None, path, wanted));
        };
        let aliases = child.refines().map(|r| r.aliases.as_slice()).unwrap_or_default();
        let mut mapped = Vec::new();
        for w in &wanted {
            match aliases.iter().find(|a| &a.parent_output == w) {
                Some(alias) => mapped.extend(alias.child_outputs.iter().cloned()),
                None if child.has_output(w) => mapped.push(w.clone()),
                None => {}
            }
        }
        let next = match child_behaviors.get(child.name()) {
            Some(b) if child.has_behavior(b) => b.clone(),
            Some(b) => return Err(CatError::UnknownBehavior(b.clone())),
            None => match child.initial_behavior() {
                Some(b) => b.to_string(),
                None => return Ok(finish(Verdict::TableIncomplete, None, Vec::new(), None, path, wanted)),
            },
        };
        if mapped.is_empty() {
            return Ok(finish(Verdict::TableIncomplete, None, Vec::new(), None, path, wanted));
        }
        doc = child;
        behavior = next;
        wanted = mapped;
    }
}

/// Plain-text report. Deterministic for a given diagnosis.
pub fn explain(d: &Diagnosis) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}", d.verdict.as_str());
    let path: Vec<String> = d.path.iter().map(|p| format!("{}/{}", p.document, p.behavior)).collect();
    let _ = writeln!(out, "path: {}", path.join(" -> "));
    match d.verdict {
        Verdict::BrokenCondition => {
            if let Some(c) = &d.culprit {
                write_culprit(&mut out, "culprit", c);
            }
            for alt in &d.related {
                write_culprit(&mut out, "alternate", alt);
            }
        }
        Verdict::TableIncomplete => {
            let _ = writeln!(
                out,
                "every condition for {} holds under {}, yet the output was not observed",
                d.outputs.join(", "),
                path.last().map(String::as_str).unwrap_or("?")
            );
            let _ = writeln!(
                out,
                "recommendation: revise the table; a condition is missing or the system model is wrong"
            );
        }
        Verdict::ResolvedAtTop => {
            if let Some(t) = &d.transition {
                let _ = writeln!(
                    out,
                    "transition fired: {} row {} (line {}): -> {} when {}",
                    t.document, t.output, t.span.line, t.target, t.guard
                );
                let _ = writeln!(out, "the behavior was leaving; the output was not owed");
            }
        }
    }
    out
}

fn write_culprit(out: &mut String, label: &str, c: &Culprit) {
    let _ = writeln!(
        out,
        "{label}: {} row {} : {} (line {})",
        c.document, c.output, c.behavior, c.span.line
    );
    for atom in &c.atoms {
        let _ = writeln!(
            out,
            "  line {}: {}  [required {}, actual {}]",
            atom.span.line, atom.cell, atom.required, atom.actual
        );
    }
    if let Some(note) = &c.note {
        let _ = writeln!(out, "  note: {note}");
    }
}
