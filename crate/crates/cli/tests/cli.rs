use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adhm-lab"))
        .args(args)
        .env_remove("ADHM_LAB_SEED")
        .output()
        .expect("binary runs")
}

fn lab_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_adhm-lab"))
        .args(args)
        .env_remove("ADHM_LAB_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn gen(dir: &Path, dims: &str, style: &str, seed: &str) -> String {
    let path = dir.join(format!("{style}-{seed}.json"));
    let p = path.to_str().unwrap().to_string();
    let out = lab(&["gen", "--dims", dims, "--style", style, "--seed", seed, "--out", &p]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn gen_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(dir.path(), "1,2,1", "diagonal", "7");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&d).unwrap()).unwrap();
    assert_eq!(doc["context"]["seed"], 7);
    let out = lab(&["verify", "--in", &d]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["stability"]["verdict"], "stable");
    assert_eq!(v["residuals"].as_array().unwrap().len(), 9);
}

#[test]
fn cohomology_of_generated_datum() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(dir.path(), "1,2,1", "lifted", "3");
    let out = lab(&["cohomology", "--in", &d, "--variant", "reduced"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["h"], serde_json::json!([0, 4, 0, 0]));
    assert_eq!(v["term_dims"], serde_json::json!([5, 16, 9, 2]));
    assert_eq!(v["context"]["rtol"], 1e-9);
}

#[test]
fn stdin_input_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(dir.path(), "2,3,1", "diagonal", "1");
    let out = lab_stdin(&["verify", "--in", "-"], &fs::read_to_string(d).unwrap());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_json_exits_3_with_position() {
    let out = lab_stdin(&["verify", "--in", "-"], "{\n  \"dims\": [1,\n");
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn missing_file_exits_3() {
    assert_eq!(lab(&["verify", "--in", "/nonexistent/x.json"]).status.code(), Some(3));
}

#[test]
fn unknown_subcommand_exits_2() {
    let out = lab(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn nonpositive_tolerance_is_a_usage_error() {
    assert_eq!(lab(&["--rtol", "0", "accept"]).status.code(), Some(2));
}

#[test]
fn unstable_datum_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(dir.path(), "1,2,1", "diagonal", "2");
    let mut v: Value = serde_json::from_str(&fs::read_to_string(&d).unwrap()).unwrap();
    v["matrices"]["I"] = serde_json::json!([[[1.0, 0.0]], [[0.0, 0.0]]]);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, v.to_string()).unwrap();
    let out = lab(&["verify", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_ne!(json_of(&out)["stability"]["verdict"], "stable");
}

#[test]
fn quotient_lift_support_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(dir.path(), "2,3,1", "lifted", "5");
    let q = dir.path().join("q.json");
    let out = lab(&["quotient", "--in", &d, "--out", q.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let frame = dir.path().join("frame.json");
    fs::write(&frame, r#"{"Aprime": [[[0.5, 0.25]]], "Bprime": [[[-0.75, 0.0]]]}"#).unwrap();
    let lifted = dir.path().join("lifted.json");
    let out = lab(&[
        "lift",
        "--in",
        q.to_str().unwrap(),
        "--frame",
        frame.to_str().unwrap(),
        "--out",
        lifted.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&lifted).unwrap()).unwrap();
    assert_eq!(doc["kernel_dim"], doc["generic_kernel_dim"]);
    let out = lab(&["support", "--in", lifted.to_str().unwrap()]);
    let pts = json_of(&out);
    assert_eq!(pts["length"], 1);
    let p = &pts["points"][0];
    assert!((p["x"][0].as_f64().unwrap() + 0.5).abs() < 1e-9);
    assert!((p["x"][1].as_f64().unwrap() + 0.25).abs() < 1e-9);
    assert!((p["y"][0].as_f64().unwrap() - 0.75).abs() < 1e-9);
}

#[test]
fn hilb_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let z1 = dir.path().join("z1.json");
    let z2 = dir.path().join("z2.json");
    fs::write(&z1, r#"{"points":[{"x":[0,0],"y":[0,0],"mult":1}]}"#).unwrap();
    fs::write(&z2, r#"{"points":[{"x":[0,0],"y":[0,0],"mult":1},{"x":[1,0],"y":[2,0],"mult":1}]}"#).unwrap();
    let datum = dir.path().join("x.json");
    let out = lab(&[
        "hilb",
        "--z1",
        z1.to_str().unwrap(),
        "--z2",
        z2.to_str().unwrap(),
        "--out",
        datum.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let back = json_of(&lab(&["hilb", "--in", datum.to_str().unwrap()]));
    assert_eq!(back["z1"]["points"].as_array().unwrap().len(), 1);
    assert_eq!(back["z2"]["points"].as_array().unwrap().len(), 2);
    assert_eq!(back["z2"]["points"][1]["y"][0], 2.0);
}

#[test]
fn flow_and_omega() {
    let dir = tempfile::tempdir().unwrap();
    let d = gen(dir.path(), "1,2,1", "diagonal", "4");
    let out = lab(&["flow", "--in", &d, "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["converged"], true);
    assert_eq!(v["flow_tol"], 1e-8);
    let om = json_of(&lab(&["omega", "--in", &d]));
    assert_eq!(om["numerical_rank"], 4);
    assert_eq!(om["well_defined"], true);
}

#[test]
fn scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = lab(&[
        "scan", "--dims", "1,2,1", "--samples", "4", "--stratum", "jordan", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(4) == Some("2")));
    assert_eq!(json_of(&out)["histogram"], serde_json::json!([[2, 4]]));
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_adhm-lab"))
        .args(["gen", "--dims", "1,1,1"])
        .env("ADHM_LAB_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(json_of(&out)["context"]["seed"], 11);
    let explicit = lab(&["gen", "--dims", "1,1,1", "--seed", "11"]);
    assert_eq!(out.stdout, explicit.stdout);
}

#[test]
fn accept_subset_is_deterministic() {
    let a = lab(&["accept", "--criteria", "3,6"]);
    let b = lab(&["accept", "--criteria", "3,6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8_lossy(&a.stdout);
    assert!(text.contains("criterion 3 PASS") && text.contains("criterion 6 PASS"));
}
