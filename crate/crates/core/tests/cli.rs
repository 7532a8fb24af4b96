use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).output().expect("lab runs")
}

fn lab_env(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab")).args(args).env("LAB_THREADS", threads).output().expect("lab runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn check_schema(report: &Value) {
    let kind = report["kind"].as_str().expect("kind");
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{kind}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).expect("schema file")).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(report).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{kind}: {errors:?}");
}

#[test]
fn one_dimensional_enumeration_has_two_states() {
    let v = json(&lab(&["enumerate", "--lattice", "segment:8", "--dist", "gaussian:0,1", "--seed", "7"]));
    assert_eq!(v["data"]["count"], 2);
    check_schema(&v);
}

#[test]
fn parity_suite_exits_zero() {
    let out = lab(&["verify", "--suite", "parity", "--trials", "100", "--seed", "1"]);
    let v = json(&out);
    assert_eq!(v["data"]["passed"], true);
    check_schema(&v);
}

#[test]
fn unknown_command_exits_two_with_usage() {
    let out = lab(&["nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert!(out.stdout.is_empty());
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        &["verify", "--suite", "nope", "--seed", "1"][..],
        &["estimate", "--event", "bogus", "--seed", "1"],
        &["enumerate", "--lattice", "box:4,4"],
        &["enumerate", "--lattice", "box:7,7", "--window", "bulk", "--outer", "bulk", "--seed", "1"],
        &["walls", "--seed", "1", "--n", "1..30", "--trials", "2"],
        &["build", "--lattice", "torus:3,3"],
    ] {
        assert_eq!(lab(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(lab_env(&["build"], "zero").status.code(), Some(2));
}

#[test]
fn help_lists_every_command() {
    let out = lab(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for c in ["build", "sample", "solve", "enumerate", "critical", "interface", "rungs", "walls", "estimate", "verify", "render-data"] {
        assert!(text.contains(c), "{c} missing from help");
    }
}

#[test]
fn every_report_matches_its_schema() {
    let runs: &[&[&str]] = &[
        &["build", "--lattice", "strip:6,4"],
        &["sample", "--lattice", "box:3,3", "--seed", "2"],
        &["solve", "--lattice", "box:5,5", "--region", "bulk", "--seed", "4"],
        &["solve", "--lattice", "box:4,4", "--bc", "free", "--seed", "4", "--solver", "transfer"],
        &["critical", "--edge", "0,1", "--seed", "3"],
        &["critical", "--all", "--seed", "3"],
        &["interface", "--seed", "5"],
        &["rungs", "--seed", "3", "--maxlen", "4"],
        &["walls", "--lattice", "strip:8,5", "--seed", "1", "--trials", "20", "--n", "1..2", "--k", "0"],
        &["estimate", "--event", "critical_below:0.5", "--seed", "1", "--trials", "30"],
        &["estimate", "--event", "false", "--seed", "1", "--trials", "30"],
        &["render-data", "--scene", "empty"],
        &["render-data", "--scene", "instance", "--seed", "3"],
        &["render-data", "--scene", "tethered-pair", "--seed", "3"],
        &["render-data", "--scene", "rung", "--seed", "3"],
    ];
    for args in runs {
        let out = lab(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["schema_version"], 1);
        check_schema(&v);
    }
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let args = ["estimate", "--event", "bond_plus", "--seed", "9", "--trials", "60"];
    let a = lab_env(&args, "1");
    let b = lab_env(&args, "4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn critical_table_csv_columns() {
    let out = lab(&["critical", "--all", "--seed", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# schema_version=1 kind=critical_table fingerprint="));
    assert_eq!(lines.next().unwrap(), "edge,J_e,C_e,F_e,S_e,S_e_x,S_e_y,supersat,droplet_size");
    assert_eq!(lines.count(), 12);
}

#[test]
fn walls_write_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("walls.json");
    let p = path.to_str().unwrap();
    let args = ["walls", "--lattice", "strip:8,5", "--seed", "2", "--trials", "10", "--n", "1..2", "--k", "0", "--out", p];
    let out = lab(&args);
    assert!(out.status.success() && out.stdout.is_empty());
    let first = std::fs::read(&path).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("walls.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("n,k,mean,stderr,trials"));
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert!(csv.contains(v["fingerprint"].as_str().unwrap()));
    assert!(lab(&args).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn couplings_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.json");
    let p = path.to_str().unwrap();
    assert!(lab(&["sample", "--lattice", "box:4,4", "--seed", "11", "--out", p]).status.success());
    let from_file = json(&lab(&["enumerate", "--couplings", p, "--window", "bulk", "--outer", "bulk"]));
    let sampled = json(&lab(&["enumerate", "--lattice", "box:4,4", "--seed", "11", "--window", "bulk", "--outer", "bulk"]));
    assert_eq!(from_file["data"], sampled["data"]);
    // the input hash names the file content, not the flags
    assert_ne!(from_file["input_hash"], sampled["input_hash"]);
    assert_eq!(lab(&["enumerate", "--couplings", p, "--lattice", "box:3,3"]).status.code(), Some(2));
}

#[test]
fn failing_assertions_exit_one() {
    // independent boundary pairs on a finite strip break subadditivity
    let out = lab(&["walls", "--strategy", "independent", "--trials", "2000", "--seed", "20240611"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["data"]["passed"], false);
    assert_eq!(v["data"]["monotone_violations"], 0);
}
