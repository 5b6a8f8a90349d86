use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_perimeter"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.json");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn square_worked_example() {
    let p = scenario("cfg-sq.json");
    let v = ok_json(&["solve1v1", "--scenario", p.to_str().unwrap()]);
    let e = &v["engagements"][0];
    assert!((e["value"].as_f64().unwrap() + 2.1798).abs() < 1e-4);
    assert_eq!(e["region"], "LEFT");
    assert_eq!(e["omega"].as_f64(), Some(1.0));
    assert!((e["s_l"].as_f64().unwrap() - 1.8145).abs() < 1e-4);
}

#[test]
fn circle_spot_value() {
    let p = scenario("circle.json");
    let v = ok_json(&["solve1v1", "--scenario", p.to_str().unwrap()]);
    assert!((v["engagements"][0]["value"].as_f64().unwrap() + 0.29922).abs() < 1e-4);
}

#[test]
fn speed_ratio_out_of_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(
        dir.path(),
        r#"{"schema_version": 1, "perimeter": {"kind": "circle", "radius": 1.0}, "nu": 1.5,
            "defenders": [0.0], "intruders": [[0.0, 2.0]]}"#,
    );
    let out = run(&["solve1v1", "--scenario", p.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(0,1]"), "{err}");
}

#[test]
fn interior_intruder_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(
        dir.path(),
        r#"{"schema_version": 1, "perimeter": {"kind": "circle", "radius": 1.0}, "nu": 0.5,
            "defenders": [0.0], "intruders": [[0.0, 2.0], [0.1, 0.1]]}"#,
    );
    let out = run(&["simulate", "--scenario", p.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("intruders[1]"));
    let out = run(&["bounds", "--scenario", "/nonexistent/scenario.json"]);
    assert!(!out.status.success());
}

#[test]
fn level_set_and_barrier_exports() {
    let dir = tempfile::tempdir().unwrap();
    let p = scenario("cfg-sq.json");
    let out = dir.path().to_str().unwrap();
    let v = ok_json(&["solve1v1", "--scenario", p.to_str().unwrap(), "--out", out, "--grid", "24", "--svg"]);
    assert_eq!(v["files"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("levelset_1v1_d0.csv")).unwrap();
    assert!(csv.starts_with("x,y,value\n"));
    assert!(csv.lines().count() > 24);
    let svg = std::fs::read_to_string(dir.path().join("barrier_d0.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));

    let v = ok_json(&["barrier", "--scenario", p.to_str().unwrap(), "--out", out, "--grid", "256"]);
    assert_eq!(v["barriers"][0]["left"].as_u64().unwrap() + v["barriers"][0]["right"].as_u64().unwrap(), 256);
    let csv = std::fs::read_to_string(dir.path().join("barrier_d0.csv")).unwrap();
    assert!(csv.starts_with("x,y\n"));
}

#[test]
fn pair_solution() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(
        dir.path(),
        r#"{"schema_version": 1, "perimeter": {"kind": "circle", "radius": 1.0}, "nu": 0.5,
            "defenders": [0.0, 3.14159], "intruders": [[0.0, 1.5]]}"#,
    );
    let out = dir.path().to_str().unwrap();
    let v = ok_json(&["solve2v1", "--scenario", p.to_str().unwrap(), "--out", out, "--grid", "16"]);
    let e = &v["engagements"][0];
    assert_eq!(e["evaluation"]["region"], "R_MID");
    assert!((e["evaluation"]["value"].as_f64().unwrap() - 0.5708).abs() < 1e-3);
    assert!(dir.path().join("levelset_2v1.csv").exists());
}

#[test]
fn bounds_are_ordered() {
    let p = scenario("team-3v3.json");
    let v = ok_json(&["bounds", "--scenario", p.to_str().unwrap()]);
    let q = |k: &str| v[k].as_u64().unwrap();
    assert!(q("q_lg") <= q("q_mis") && q("q_mis") <= q("q_mm"));
    assert!(v["assignments"]["mis"]["edges"].is_array());
}

#[test]
fn simulation_writes_trace_summary_and_frames() {
    let dir = tempfile::tempdir().unwrap();
    let p = scenario("team-3v3.json");
    let out = dir.path().to_str().unwrap();
    let v = ok_json(&["simulate", "--scenario", p.to_str().unwrap(), "--out", out, "--svg", "--dt", "0.01", "--seed", "3"]);
    assert_eq!(v["params"]["dt"].as_f64(), Some(0.01));
    let q = v["outcome"]["q"].as_u64().unwrap();
    assert!(q <= 3);
    let trace = std::fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    let first: Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    assert_eq!(first["defenders"].as_array().unwrap().len(), 3);
    let summary: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["outcome"], v["outcome"]);
    let frames = std::fs::read_dir(dir.path().join("frames")).unwrap().count();
    assert!(frames >= 2);
}

#[test]
fn batch_and_oracle_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_scenario(
        dir.path(),
        r#"{"schema_version": 1, "perimeter": {"kind": "circle", "radius": 1.0, "resolution": 128}, "nu": 0.5,
            "montecarlo": {"instances": 6, "policies": [{"kind": "mm"}]},
            "oracle": {"samples": 30, "minimax": {"defender_cells": 16, "grid": 24, "headings": 8, "depth": 60, "margin": 0.5}}}"#,
    );
    let v = ok_json(&["montecarlo", "--scenario", p.to_str().unwrap()]);
    assert_eq!(v["instances"].as_u64(), Some(6));
    assert_eq!(v["chain_violations"].as_u64(), Some(0));
    assert_eq!(v["policies"][0]["runs"].as_u64(), Some(6));
    let v = ok_json(&["oracle", "--scenario", p.to_str().unwrap()]);
    assert!(v["circle"]["max_abs_error"].as_f64().unwrap() < 5e-3);
    assert_eq!(v["dominance"]["violations"].as_u64(), Some(0));
    assert!(v["minimax"]["states"].as_u64().unwrap() > 0);
}
