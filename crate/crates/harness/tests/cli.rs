use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FIGURE1: &str = r#"{
  "objects": ["o1", "o2", "o3", "o4"],
  "quota": 2,
  "preferences": {
    "agent1": ["o1", "o2", "o3", "o4"],
    "agent2": ["o3", "o2", "o4", "o1"]
  }
}"#;

const CONTESTED: &str = r#"{
  "objects": ["a", "b", "c", "d"],
  "quota": 2,
  "preferences": {
    "agent1": ["a", "b", "c", "d"],
    "agent2": ["b", "c", "a", "d"]
  }
}"#;

fn mudra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mudra"))
        .args(args)
        .env_remove("MUDRA_GUARD")
        .output()
        .expect("spawn mudra")
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn strip_timing(mut v: Value) -> Value {
    if let Some(map) = v.as_object_mut() {
        map.remove("elapsed_ms");
        map.remove("timing");
    }
    v
}

#[test]
fn compute_prints_the_exact_matrix() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", FIGURE1);
    let out = mudra(&["--json", "compute", "--rule", "mps", "--profile", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["matrix"]["agent1"]["o1"], "7/8");
    assert_eq!(v["matrix"]["agent2"]["o4"], "5/8");
}

#[test]
fn compute_trace_lists_breakpoints() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", FIGURE1);
    let out = mudra(&["--json", "compute", "--rule", "mps", "--profile", p.to_str().unwrap(), "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for t in ["1/2", "3/4", "7/8", "9/8"] {
        assert!(text.contains(&format!("\"{t}\"")), "{t} missing");
    }
}

#[test]
fn bad_input_names_the_offending_path() {
    let dir = TempDir::new().unwrap();
    let bad = FIGURE1.replace(r#"["o3", "o2", "o4", "o1"]"#, r#"["o3", "o2", "o9", "o1"]"#);
    let p = write(dir.path(), "bad.json", &bad);
    let out = mudra(&["--json", "compute", "--rule", "mps", "--profile", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("preferences.agent2[2]"), "{err}");

    let p = write(dir.path(), "extra.json", &FIGURE1.replace("\"quota\"", "\"colour\": 1, \"quota\""));
    let out = mudra(&["compute", "--rule", "ops", "--profile", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let out = mudra(&["compute", "--rule", "ops", "--profile", "/nonexistent/p.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unknown_case_lists_the_available_ones() {
    let out = mudra(&["reproduce", "nope"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("theorem1") && err.contains("figure1"), "{err}");
}

#[test]
fn guard_refusal_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_mudra"))
        .args(["--json", "table1"])
        .env("MUDRA_GUARD", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
    let out = mudra(&["--guard", "10", "enumerate", "--agents", "2", "--objects", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumerate_counts_profiles() {
    let out = mudra(&["enumerate", "--agents", "2", "--objects", "4", "--count"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "576");
    let out = mudra(&["enumerate", "--agents", "3", "--objects", "3", "--count"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "216");
}

#[test]
fn manipulate_reports_the_first_witness() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", CONTESTED);
    let path = p.to_str().unwrap();
    let out = mudra(&["--json", "manipulate", "--rule", "ops", "--profile", path, "--agent", "agent1", "--kind", "weak-sd"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let reported: Vec<&str> = v["reported"]["preferences"]["agent1"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap())
        .collect();
    assert_eq!(reported, ["b", "a", "c", "d"]);
    assert_eq!(v["manipulated_outcome"]["matrix"]["agent1"]["b"], "1/2");

    let out = mudra(&["manipulate", "--rule", "mps", "--profile", path, "--agent", "agent1", "--kind", "weak-sd"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "none");
}

#[test]
fn check_reports_a_verifiable_certificate() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "p.json", FIGURE1);
    let out = mudra(&["--json", "check", "--property", "ex-post", "--profile", p.to_str().unwrap(), "--rule", "mps"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "fails");
    let a = write(
        dir.path(),
        "a.json",
        r#"{"matrix": {"agent1": {"o1": "1", "o2": "1"}, "agent2": {"o3": "1", "o4": "1"}}}"#,
    );
    let out = mudra(&[
        "--json", "check", "--property", "sd-efficient", "--profile", p.to_str().unwrap(), "--assignment",
        a.to_str().unwrap(),
    ]);
    assert_eq!(json(&out)["verdict"], "holds");
}

#[test]
fn reports_are_deterministic() {
    let first = mudra(&["--json", "reproduce", "theorem2"]);
    let second = mudra(&["--json", "reproduce", "theorem2"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(strip_timing(json(&first)), strip_timing(json(&second)));
}

#[test]
fn known_erratum_is_a_discrepancy() {
    let out = mudra(&["--json", "reproduce", "expost"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], "discrepancy");
}
