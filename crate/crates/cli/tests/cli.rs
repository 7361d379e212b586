use std::path::PathBuf;
use std::process::{Command, Output};

use cat_core::corpus::{corpus_document, roomba_script, simulate, FaultEdit, FaultInjection};
use cat_core::monitor::write_trace;

fn corpus(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "corpus", name].iter().collect();
    path.display().to_string()
}

fn cattool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cattool"))
        .args(args)
        .env("CAT_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

const HOVER: [&str; 22] = [
    "--set", "pose=0,0,1.5",
    "--set", "battery=80",
    "--set", "flying=true",
    "--set", "armMotors=true",
    "--set", "velocity=0,0,0.1",
    "--set", "velocityCmd=false",
    "--set", "defaultAltitudeSet=false",
    "--set", "waypointSet=false",
    "--set", "commandVelocity=0,0,0",
    "--set", "yawRate=0",
    "--set", "controlMode=Manual",
];

#[test]
fn check_on_the_core_table_is_clean() {
    let o = cattool(&["check", &corpus("roomba-core.cat")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("coverage 1440 grid points, 0 undefined"));
}

#[test]
fn check_reports_parse_errors_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cat");
    std::fs::write(&bad, "cat \"x\"\nlevel 0\ninput a : bool\nrow o : A\n  b : == true\n").unwrap();
    let o = cattool(&["check", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(":5:3: error[unknown-input]"), "{}", stderr(&o));
}

#[test]
fn check_fails_on_error_findings() {
    let dir = tempfile::tempdir().unwrap();
    let parent = dir.path().join("p.cat");
    let child = dir.path().join("c.cat");
    std::fs::write(&parent, "cat \"p\"\nlevel 0\ninput a : bool\nrow o : Run\n  a : == true\n").unwrap();
    std::fs::write(&child, "cat \"c\"\nlevel 1\nrefines \"p\" behavior Run\nrow q : X\n  zz : == true\n").unwrap();
    let o = cattool(&["check", parent.to_str().unwrap(), child.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json(&o);
    assert_eq!(j["schema_version"], 1);
    assert_eq!(j["errors"], 1);
    assert_eq!(j["files"][1]["diagnostics"][0]["code"], "orphan-input");
}

#[test]
fn diagnose_names_the_hover_cell() {
    let mut args = vec!["diagnose", "", "", "--violated", "holdAltitude", "--behavior", "Fly"];
    let core = corpus("pelican-core.cat");
    let fly = corpus("pelican-fly.cat");
    args[1] = &core;
    args[2] = &fly;
    args.extend(HOVER);
    let o = cattool(&args);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("verdict: broken-condition"));
    assert!(text.contains("path: pelican-core/Fly -> pelican-fly/Hover"));
    assert!(text.contains("defaultAltitudeSet : == true"));
    assert_eq!(cattool(&args).stdout, o.stdout, "output is deterministic");

    args.extend(["--format", "json"]);
    let j = json(&cattool(&args));
    assert_eq!(j["diagnosis"]["verdict"], "broken-condition");
    assert_eq!(j["diagnosis"]["culprit"]["atoms"][0]["input"], "defaultAltitudeSet");
}

#[test]
fn eval_outside_the_domain_is_a_usage_error() {
    let core = corpus("roomba-core.cat");
    let o = cattool(&[
        "eval", &core, "--behavior", "Drive", "--set", "batteryLevel=120", "--set", "warningLight=false",
        "--set", "cleaningType=Spot", "--set", "velocity=0.2", "--set", "changeInState=false",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("error[domain-violation]"));
}

#[test]
fn eval_prints_outputs_and_next_behavior() {
    let core = corpus("roomba-core.cat");
    let o = cattool(&[
        "eval", &core, "--behavior", "Drive", "--set", "batteryLevel=50", "--set", "warningLight=false",
        "--set", "cleaningType=Spot", "--set", "velocity=0.2", "--set", "changeInState=true",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("expected outputs: (none)"));
    assert!(text.contains("next behavior: Clean"));
}

#[test]
fn child_documents_need_their_parent_for_eval() {
    let drive = corpus("roomba-drive.cat");
    let core = corpus("roomba-core.cat");
    let sets = [
        "--set", "bumpDetect=true", "--set", "cliff=false", "--set", "wheelDrop=false",
        "--set", "wallDistance=10", "--set", "batteryLevel=50", "--set", "velocity=0.2",
    ];
    let mut args = vec!["eval", drive.as_str(), "--behavior", "Turn"];
    args.extend(sets);
    assert_eq!(cattool(&args).status.code(), Some(2));
    args.extend(["--parent", core.as_str()]);
    let o = cattool(&args);
    assert!(o.status.code().unwrap() < 2, "{}", stderr(&o));
}

#[test]
fn unknown_flags_and_missing_subcommands_exit_two() {
    assert_eq!(cattool(&["check", "--frobnicate", "x.cat"]).status.code(), Some(2));
    assert_eq!(cattool(&[]).status.code(), Some(2));
    assert_eq!(cattool(&["check", "/no/such/file.cat"]).status.code(), Some(2));
    let bad_color = Command::new(env!("CARGO_BIN_EXE_cattool"))
        .args(["stats", &corpus("roomba-core.cat")])
        .env("CAT_COLOR", "rainbow")
        .output()
        .unwrap();
    assert_eq!(bad_color.status.code(), Some(2));
}

#[test]
fn stats_reproduce_the_pelican_totals() {
    let o = cattool(&["stats", &corpus("pelican-core.cat"), &corpus("pelican-fly.cat"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let j = json(&o);
    assert_eq!(j["command"], "stats");
    assert_eq!(j["total"], serde_json::json!({ "behaviors": 11, "outputs": 12, "inputs": 13, "pairs": 70 }));
}

#[test]
fn refine_accepts_the_corpus_pairs() {
    let o = cattool(&["refine", &corpus("pelican-core.cat"), &corpus("pelican-fly.cat")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("accepted"));
}

#[test]
fn coverage_exit_code_reflects_gaps() {
    assert_eq!(cattool(&["coverage", &corpus("roomba-core.cat")]).status.code(), Some(0));
    let o = cattool(&["coverage", &corpus("roomba-slam.cat"), "--max-cases", "50", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json(&o);
    assert_eq!(j["report"]["truncated"], true);
    assert_eq!(j["report"]["enumerated_count"], 50);
}

#[test]
fn tests_lists_one_test_per_subrow() {
    let o = cattool(&["tests", &corpus("roomba-core.cat"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["tests"].as_array().unwrap().len(), 7);
}

#[test]
fn add_input_rewrites_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.cat");
    std::fs::write(&file, "cat \"t\"\nlevel 0\ninput a : bool\nrow o : A\n  a : == true\n").unwrap();
    let path = file.to_str().unwrap();
    let o = cattool(&["add-input", path, "--name", "speed", "--type", "number unit mps domain [0, 2]"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains("input speed : number unit mps domain [0, 2]"));
    assert_eq!(cattool(&["add-input", path, "--name", "a", "--type", "bool"]).status.code(), Some(2));
    assert_eq!(cattool(&["add-input", path, "--name", "b", "--type", "colour"]).status.code(), Some(2));
}

#[test]
fn monitor_counts_injected_faults() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("trace.jsonl");
    let doc = corpus_document("roomba-core").unwrap();
    let core = corpus("roomba-core.cat");

    std::fs::write(&log, write_trace(&simulate(&roomba_script(200), &doc).unwrap())).unwrap();
    let o = cattool(&["monitor", &core, "--log", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("200 records, 0 violations"));

    let mut script = roomba_script(200);
    script.fault_injections = vec![FaultInjection { step: 7, edit: FaultEdit::AddOutput { output: "chargeComplete".into() } }];
    std::fs::write(&log, write_trace(&simulate(&script, &doc).unwrap())).unwrap();
    let o = cattool(&["monitor", &core, "--log", log.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let j = json(&o);
    assert_eq!(j["events"][0]["kind"], "unexpected-output");
    assert_eq!(j["events"][0]["t"], 7.0);

    std::fs::write(&log, "{not json\n").unwrap();
    let o = cattool(&["monitor", &core, "--log", log.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("malformed-trace"));
}
