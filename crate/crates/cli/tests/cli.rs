use std::path::Path;
use std::process::{Command, Output};

fn dynacon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynacon"))
        .args(args)
        .env_remove("DYNACON_LLM_ENDPOINT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn pattern_suite_table() {
    let out = dynacon(&["suite", "--set", "pattern", "--backend", "oracle"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Success Rate (%): 100.0 (8/8)"), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("Corridor")).count(), 8);
}

#[test]
fn category_suite_matches_its_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("expect.json");
    std::fs::write(
        &manifest,
        r#"{"house1_kitchen": "success", "house1_bedroom": "failure", "house3_living_room": "failure"}"#,
    )
    .unwrap();
    let out = dynacon(&[
        "suite",
        "--set",
        "category",
        "--report",
        "jsonl",
        "--expect",
        manifest.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 8);

    std::fs::write(&manifest, r#"{"house1_bedroom": "success"}"#).unwrap();
    let out = dynacon(&["suite", "--set", "category", "--expect", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("house1_bedroom"));
}

#[test]
fn run_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let out = dynacon(&[
        "run",
        "--scenario",
        "corridor1_t1",
        "--trace",
        trace.to_str().unwrap(),
        "--seed",
        "4",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("corridor1_t1: success"));
    let text = std::fs::read_to_string(&trace).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["tick", "pose", "cmd", "list_hash", "verdict", "goal_point"] {
        assert!(first.get(key).is_some(), "trace lacks {key}");
    }
}

#[test]
fn run_accepts_a_scenario_file() {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/scenarios/house3_kitchen.json");
    let out = dynacon(&["run", "--scenario", fixture.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("verdicts [None, refrigerator"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn svg_reports_go_to_the_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynacon(&[
        "suite",
        "--set",
        "pattern",
        "--report",
        "svg-traj",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(dir.path().join("corridor3_t8.svg").exists());
}

#[test]
fn ablation_emits_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynacon(&["ablation", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("scenario1 oracle: [room_205, room_203, room_202]"));
    assert!(dir.path().join("scenario2_unstructured.txt").exists());
}

#[test]
fn usage_errors() {
    assert!(!dynacon(&["suite", "--set", "garden"]).status.success());
    let out = dynacon(&["run", "--scenario", "nowhere_t9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dynacon(&["run", "--scenario", "corridor1_t1", "--backend", "llm"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DYNACON_LLM_ENDPOINT"));
}
