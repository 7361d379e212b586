use std::collections::BTreeMap;

use cat_core::corpus::load_corpus;
use cat_core::diagnose::{diagnose, diagnose_with, explain, CatHierarchy, Verdict};
use cat_core::model::{CatDocument, Valuation, Value, Vec3};
use cat_core::parser::parse;

fn pelican() -> CatHierarchy {
    let docs = load_corpus().into_iter().filter(|e| e.id.starts_with("pelican")).map(|e| e.document).collect();
    CatHierarchy::new(docs).unwrap()
}

fn v3(x: f64, y: f64, z: f64) -> Value {
    Value::Vec3(Vec3 { x, y, z })
}

fn hover_snapshot(default_altitude: bool) -> Valuation {
    Valuation::new("Fly")
        .with("pose", v3(0.0, 0.0, 1.5))
        .with("battery", Value::Number(80.0))
        .with("flying", Value::Bool(true))
        .with("armMotors", Value::Bool(true))
        .with("velocity", v3(0.0, 0.0, 0.1))
        .with("velocityCmd", Value::Bool(false))
        .with("defaultAltitudeSet", Value::Bool(default_altitude))
        .with("waypointSet", Value::Bool(false))
        .with("commandVelocity", v3(0.0, 0.0, 0.0))
        .with("yawRate", Value::Number(0.0))
        .with("controlMode", Value::Enum("Manual".into()))
}

fn doc(source: &str) -> CatDocument {
    parse(source).document.unwrap()
}

#[test]
fn hover_drift_blames_the_default_altitude_cell() {
    let d = diagnose(&pelican(), "pelican-core", "holdAltitude", &hover_snapshot(false)).unwrap();
    assert_eq!(d.verdict, Verdict::BrokenCondition);
    let path: Vec<_> = d.path.iter().map(|p| (p.document.as_str(), p.behavior.as_str())).collect();
    assert_eq!(path, [("pelican-core", "Fly"), ("pelican-fly", "Hover")]);
    let culprit = d.culprit.as_ref().unwrap();
    assert_eq!(culprit.atoms.len(), 1);
    assert_eq!(culprit.atoms[0].input, "defaultAltitudeSet");
    assert_eq!(culprit.atoms[0].actual, Value::Bool(false));
    let text = explain(&d);
    assert!(text.contains("defaultAltitudeSet : == true"), "{text}");
    assert!(text.contains("note: with no velocity command"), "{text}");
    assert_eq!(text, explain(&d));
}

#[test]
fn all_cells_true_means_the_table_is_incomplete() {
    let d = diagnose(&pelican(), "pelican-core", "holdAltitude", &hover_snapshot(true)).unwrap();
    assert_eq!(d.verdict, Verdict::TableIncomplete);
    assert_eq!(d.path.len(), 2);
    assert!(explain(&d).contains("recommendation: revise the table"));
}

#[test]
fn a_firing_transition_at_the_top_explains_the_absence() {
    let v = hover_snapshot(true).with("battery", Value::Number(20.0));
    let d = diagnose(&pelican(), "pelican-core", "holdAltitude", &v).unwrap();
    assert_eq!(d.verdict, Verdict::ResolvedAtTop);
    let t = d.transition.unwrap();
    assert_eq!(t.target, "Land");
    assert_eq!(d.path.len(), 1);
}

#[test]
fn the_child_behavior_can_be_chosen() {
    let mut behaviors = BTreeMap::new();
    behaviors.insert("pelican-fly".to_string(), "Waypoint".to_string());
    let d = diagnose_with(&pelican(), "pelican-core", "holdAltitude", &hover_snapshot(true), &behaviors).unwrap();
    assert_eq!(d.path[1].behavior, "Waypoint");
    assert_eq!(d.verdict, Verdict::BrokenCondition);
    let inputs: Vec<_> = d.culprit.unwrap().atoms.into_iter().map(|a| a.input).collect();
    assert_eq!(inputs, ["waypointSet", "controlMode"]);
}

#[test]
fn child_values_must_be_supplied() {
    let mut v = hover_snapshot(true);
    v.values.remove("yawRate");
    let err = diagnose(&pelican(), "pelican-core", "holdAltitude", &v).unwrap_err();
    assert_eq!(err.code(), "missing-child-values");
}

#[test]
fn bad_requests_are_rejected() {
    let h = pelican();
    let v = hover_snapshot(true);
    assert_eq!(diagnose(&h, "pelican-fly", "holdAltitude", &v).unwrap_err().code(), "bad-hierarchy");
    assert_eq!(diagnose(&h, "pelican-core", "sing", &v).unwrap_err().code(), "unknown-output");
    assert_eq!(diagnose(&h, "nope", "holdAltitude", &v).unwrap_err().code(), "unknown-document");
    let v = v.with_behavior("Dance");
    assert_eq!(diagnose(&h, "pelican-core", "holdAltitude", &v).unwrap_err().code(), "unknown-behavior");
}

#[test]
fn aliases_map_parent_outputs_onto_child_rows() {
    let docs: Vec<_> = load_corpus().into_iter().filter(|e| e.id.starts_with("roomba")).map(|e| e.document).collect();
    let h = CatHierarchy::new(docs).unwrap();
    let v = Valuation::new("Clean")
        .with("batteryLevel", Value::Number(50.0))
        .with("warningLight", Value::Bool(false))
        .with("cleaningType", Value::Enum("General".into()))
        .with("velocity", Value::Number(0.2))
        .with("changeInState", Value::Bool(false))
        .with("dirtLevel", Value::Number(0.0))
        .with("incomingCommand", Value::Enum("None".into()))
        .with("brushJam", Value::Bool(true));
    let d = diagnose(&h, "roomba-core", "pickUpDirt", &v).unwrap();
    assert_eq!(d.path[1].document, "roomba-clean");
    assert_eq!(d.verdict, Verdict::BrokenCondition);
    assert_eq!(d.outputs, ["vacuumSpin"]);
    let culprit = d.culprit.unwrap();
    assert_eq!((culprit.output.as_str(), culprit.behavior.as_str()), ("vacuumSpin", "General"));
    assert_eq!(culprit.atoms[0].input, "brushJam");
}

#[test]
fn hierarchy_rejects_bad_forests() {
    let root = doc("cat \"r\"\nlevel 0\ninput a : bool\nrow o : A\n  a : any\n");
    let child = doc("cat \"c\"\nlevel 1\nrefines \"r\" behavior A\nrow p : X\n  a : any\n");
    let twin = doc("cat \"d\"\nlevel 1\nrefines \"r\" behavior A\nrow p : X\n  a : any\n");
    let lost = doc("cat \"l\"\nlevel 1\nrefines \"r\" behavior Z\nrow p : X\n  a : any\n");
    assert!(CatHierarchy::new(vec![root.clone(), child.clone()]).is_ok());
    assert_eq!(CatHierarchy::new(vec![root.clone(), root.clone()]).unwrap_err().code(), "bad-hierarchy");
    assert_eq!(CatHierarchy::new(vec![root.clone(), child.clone(), twin]).unwrap_err().code(), "bad-hierarchy");
    assert_eq!(CatHierarchy::new(vec![root.clone(), lost]).unwrap_err().code(), "bad-link");
    assert_eq!(CatHierarchy::new(vec![child]).unwrap_err().code(), "bad-link");

    let h = CatHierarchy::new(vec![root, doc("cat \"c\"\nlevel 1\nrefines \"r\" behavior A\nrow p : X\n  a : any\n")]).unwrap();
    assert_eq!(h.parent("c"), Some(("r", "A")));
    assert_eq!(h.child("r", "A").unwrap().name(), "c");
    assert_eq!(h.roots().len(), 1);
    assert_eq!(h.subtree("r").len(), 2);
    assert!(h.document("c").unwrap().is_resolved());
}
