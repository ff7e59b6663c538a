//! End-to-end checks of the command-line tool.

use std::path::Path;
use std::process::{Command, Output};

use sfgsim::harness::{load_scenario, save_scenario, scenario_preset};

fn sfgsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfgsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> serde_json::Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = sfgsim(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

#[test]
fn fast_subcommands_emit_json() {
    let counts = ok_json(&["lattice", "count", "--radius", "5"]);
    assert_eq!(counts.as_array().unwrap().len(), 1);
    let shells = ok_json(&["lattice", "shells", "--shells", "3"]);
    assert_eq!(shells.as_array().unwrap().len(), 3);
    ok_json(&["dope", "stats", "--radius", "40", "--seed", "3"]);
    let emt = ok_json(&["emt"]);
    assert!((emt[0]["bohr_radius_angstrom"].as_f64().unwrap() - 2.105).abs() < 0.01);
    let curve = ok_json(&["exchange", "curve", "--r-min", "5", "--r-max", "6", "--step", "0.5"]);
    assert_eq!(curve.as_array().unwrap().len(), 3);
    let split = ok_json(&["splitting", "curve", "--r-min", "10", "--r-max", "12", "--step", "1"]);
    assert_eq!(split.as_array().unwrap().len(), 3);
    let gate = ok_json(&["gate", "run", "--j1", "1", "--j2", "1"]);
    assert_eq!(gate["clean"], true);
    let presets = ok_json(&["presets", "list"]);
    assert!(presets.as_array().unwrap().iter().any(|p| p["name"] == "table1"));
}

#[test]
fn csv_output_has_header() {
    let out = sfgsim(&["exchange", "curve", "--r-min", "5", "--r-max", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("R_angstrom,J_ground_meV,J_excited_meV,J_excited_half_radius_meV")
    );
    assert_eq!(lines.count(), 1);
}

#[test]
fn scan_then_infer() {
    let dir = tempfile::tempdir().unwrap();
    let scan = dir.path().join("scan.json");
    let out = sfgsim(&[
        "configure", "scan", "--random", "--seed", "5", "--format", "json", "--out",
        scan.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let hyp = ok_json(&["configure", "infer", "--scan", scan.to_str().unwrap()]);
    assert_eq!(hyp["gates"].as_array().unwrap().len(), 2);
}

#[test]
fn unknown_preset_fails() {
    let out = sfgsim(&["feasibility", "run", "--preset", "nope"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn malformed_scenario_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let mut v: serde_json::Value = serde_json::from_str(&scenario_preset("empty").unwrap().to_json()).unwrap();
    v["lattice"]["extra"] = serde_json::json!(true);
    write(&path, &serde_json::to_string_pretty(&v).unwrap());
    let out = sfgsim(&["feasibility", "run", "--scenario", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("extra"), "{err}");
}

#[test]
fn failing_stage_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tight.json");
    let mut s = scenario_preset("table1").unwrap();
    s.stages.gate_dynamics = false;
    s.epr.spread = 0.01;
    save_scenario(&s, &path).unwrap();
    let out = sfgsim(&["feasibility", "run", "--scenario", path.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("configure stage failed"), "{err}");
}

#[test]
fn saved_scenario_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("saved.json");
    let out = sfgsim(&[
        "feasibility", "run", "--preset", "empty", "--seed", "9", "--save-scenario",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let back = load_scenario(&path).unwrap();
    let mut want = scenario_preset("empty").unwrap();
    want.seed = 9;
    assert_eq!(back, want);
}

#[test]
fn patch_statistics_repeat_for_a_seed() {
    let args = ["feasibility", "patches", "--n", "4", "--seed", "11"];
    let a = sfgsim(&args);
    let b = sfgsim(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let c = sfgsim(&["feasibility", "patches", "--n", "4", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}
