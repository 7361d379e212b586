//! Example tables for a household vacuum robot and a research quadrotor,
//! shipped as `.cat` sources, plus a scripted trace generator.

mod sim;

use std::collections::BTreeMap;

pub use sim::{simulate, FaultEdit, FaultInjection, Profile, Segment, SimScript};

use crate::model::{table_stats, CatDocument, TableStats, Value};
use crate::parser::parse;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub id: &'static str,
    pub file_name: &'static str,
    pub source: &'static str,
    pub document: CatDocument,
    pub expected_stats: TableStats,
    /// Which cells follow the documented robot description and which were
    /// filled in to complete the table.
    pub provenance_notes: &'static str,
}

struct Source {
    id: &'static str,
    file_name: &'static str,
    text: &'static str,
    stats: TableStats,
    provenance: &'static str,
}

const fn stats(behaviors: usize, outputs: usize, inputs: usize, pairs: usize) -> TableStats {
    TableStats { behaviors, outputs, inputs, pairs }
}

const SOURCES: [Source; 6] = [
    Source {
        id: "roomba-core",
        file_name: "roomba-core.cat",
        text: include_str!("../../corpus/roomba-core.cat"),
        stats: stats(3, 6, 5, 14),
        provenance: "documented: behaviors Drive, Clean and Charging; outputs wheelsMove, pickUpDirt and \
                     increasePower; the four wheelsMove cells; the low-battery transition to Charging. \
                     reconstructed: the 15 and 95 percent thresholds, holdPosition, errorBeep, chargeComplete, \
                     every other transition, and the changeInState input, kept because the wheelsMove \
                     conjunction uses it although the input list omits it.",
    },
    Source {
        id: "roomba-clean",
        file_name: "roomba-clean.cat",
        text: include_str!("../../corpus/roomba-clean.cat"),
        stats: stats(3, 1, 6, 11),
        provenance: "documented: the General, Spot and Max modes. reconstructed: the vacuumSpin output and \
                     its alias, dirtLevel, incomingCommand, brushJam, all thresholds and all transitions.",
    },
    Source {
        id: "roomba-drive",
        file_name: "roomba-drive.cat",
        text: include_str!("../../corpus/roomba-drive.cat"),
        stats: stats(3, 3, 6, 11),
        provenance: "documented: the Turn, Forward and Reverse primitives; Turn requires bumpDetect true \
                     and cliff false. reconstructed: outputs, wheelDrop, wallDistance, the second Reverse \
                     sub-row, thresholds and transitions.",
    },
    Source {
        id: "roomba-slam",
        file_name: "roomba-slam.cat",
        text: include_str!("../../corpus/roomba-slam.cat"),
        stats: stats(1, 3, 5, 14),
        provenance: "documented: the SLAM behavior, the map output and its five inputs. reconstructed: \
                     the sensor range, the pose bounds, mapPaused and mapLost.",
    },
    Source {
        id: "pelican-core",
        file_name: "pelican-core.cat",
        text: include_str!("../../corpus/pelican-core.cat"),
        stats: stats(5, 7, 5, 28),
        provenance: "documented: behaviors Takeoff, Land, Fly, Idle and Emergency; pose and velocity \
                     inputs including vertical velocity. reconstructed: every output except holdAltitude, \
                     every threshold and transition. counts are chosen so that this table and pelican-fly \
                     together have 11 behaviors, 12 outputs, 13 inputs and 70 pairs.",
    },
    Source {
        id: "pelican-fly",
        file_name: "pelican-fly.cat",
        text: include_str!("../../corpus/pelican-fly.cat"),
        stats: stats(6, 5, 8, 42),
        provenance: "documented: Hover holds altitude only with no velocity command and a default \
                     altitude set; without one the vehicle drifts. reconstructed: the other five modes, \
                     every other cell and all transitions.",
    },
];

/// Parses every corpus source. Panics if a shipped file is invalid, which
/// the test suite rules out.
pub fn load_corpus() -> Vec<CorpusEntry> {
    SOURCES
        .iter()
        .map(|s| {
            let parsed = parse(s.text);
            let document = parsed
                .document
                .unwrap_or_else(|| panic!("corpus file {} does not parse: {:?}", s.file_name, parsed.diagnostics));
            CorpusEntry {
                id: s.id,
                file_name: s.file_name,
                source: s.text,
                document,
                expected_stats: s.stats,
                provenance_notes: s.provenance,
            }
        })
        .collect()
}

pub fn corpus_document(id: &str) -> Option<CatDocument> {
    load_corpus().into_iter().find(|e| e.id == id).map(|e| e.document)
}

/// Aggregate counts of a set of entries.
pub fn corpus_stats(entries: &[&CorpusEntry]) -> TableStats {
    let docs: Vec<CatDocument> = entries.iter().map(|e| e.document.clone()).collect();
    table_stats(&docs)
}

fn cycle(segments: &[(Value, usize)]) -> Profile {
    Profile::Cycle {
        segments: segments.iter().map(|(value, steps)| Segment { value: value.clone(), steps: *steps }).collect(),
    }
}

/// A conformant script for `roomba-core`: the battery drains while driving
/// or cleaning and charges in Charging, the warning light blinks now and
/// then, and the operator toggles between driving and cleaning. The
/// velocity command is never zero.
pub fn roomba_script(duration: usize) -> SimScript {
    let enm = |s: &str| Value::Enum(s.to_string());
    let mut input_profiles = BTreeMap::new();
    input_profiles.insert(
        "batteryLevel".to_string(),
        Profile::Battery { initial: 60.0, drain: 1.5, charge: 4.0, charging_behavior: "Charging".to_string() },
    );
    input_profiles.insert(
        "warningLight".to_string(),
        cycle(&[(Value::Bool(false), 37), (Value::Bool(true), 3)]),
    );
    input_profiles.insert(
        "cleaningType".to_string(),
        cycle(&[(enm("General"), 50), (enm("Spot"), 30), (enm("Max"), 20)]),
    );
    input_profiles.insert(
        "velocity".to_string(),
        cycle(&[(Value::Number(0.3), 7), (Value::Number(0.2), 5), (Value::Number(-0.2), 4)]),
    );
    input_profiles.insert(
        "changeInState".to_string(),
        cycle(&[(Value::Bool(false), 23), (Value::Bool(true), 1)]),
    );
    SimScript { duration, initial_behavior: None, input_profiles, fault_injections: Vec::new() }
}
