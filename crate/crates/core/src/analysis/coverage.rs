use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probes::ProbeGrid;
use crate::logic::evaluate_unchecked;
use crate::model::{CatDocument, TransitionRef, Valuation, Value};
use crate::CatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncoveredCase {
    pub behavior: String,
    pub witness: Valuation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NondeterministicCase {
    pub witness: Valuation,
    pub transitions: Vec<TransitionRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub uncovered: Vec<UncoveredCase>,
    /// Grid points where two firing rules disagree on the next behavior.
    pub nondeterministic: Vec<NondeterministicCase>,
    pub enumerated_count: u64,
    /// True when some behavior's grid was cut short by `max_cases`.
    pub truncated: bool,
    pub discretization: BTreeMap<String, Vec<Value>>,
}

struct BehaviorScan {
    uncovered: Vec<UncoveredCase>,
    nondeterministic: Vec<NondeterministicCase>,
    count: u64,
    truncated: bool,
}

/// Evaluates every behavior over the probe grid, at most `max_cases` grid
/// points per behavior, and collects the undefined responses.
pub fn coverage(doc: &CatDocument, max_cases: u64) -> Result<CoverageReport, CatError> {
    let grid = ProbeGrid::new(doc)?;
    let behaviors: Vec<&str> = doc.behaviors();
    let scans: Vec<BehaviorScan> = behaviors
        .par_iter()
        .map(|behavior| {
            let mut scan = BehaviorScan {
                uncovered: Vec::new(),
                nondeterministic: Vec::new(),
                count: 0,
                truncated: grid.size() > max_cases,
            };
            for values in grid.iter().take(usize::try_from(max_cases).unwrap_or(usize::MAX)) {
                scan.count += 1;
                let v = Valuation { values, active_behavior: behavior.to_string() };
                let outcome = evaluate_unchecked(doc, &v);
                if let Some(transitions) = outcome.nondeterministic_transition {
                    scan.nondeterministic.push(NondeterministicCase { witness: v.clone(), transitions });
                }
                if outcome.undefined_response {
                    scan.uncovered.push(UncoveredCase { behavior: behavior.to_string(), witness: v });
                }
            }
            scan
        })
        .collect();

    let mut report = CoverageReport {
        uncovered: Vec::new(),
        nondeterministic: Vec::new(),
        enumerated_count: 0,
        truncated: false,
        discretization: grid.discretization(),
    };
    for scan in scans {
        report.uncovered.extend(scan.uncovered);
        report.nondeterministic.extend(scan.nondeterministic);
        report.enumerated_count += scan.count;
        report.truncated |= scan.truncated;
    }
    Ok(report)
}
