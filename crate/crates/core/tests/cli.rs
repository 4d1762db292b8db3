//! The `nonopen` binary: outputs, files and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nonopen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonopen"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn models_lists_every_pair() {
    let out = nonopen(&["models"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    let models: Vec<&str> = rows
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["model"].as_str().unwrap())
        .collect();
    for m in [
        "l2_weighted",
        "lp_seq",
        "linf_dyadic",
        "c0_dyadic",
        "lp_grid",
        "weaksep",
    ] {
        assert!(models.contains(&m), "{m} missing");
    }
    let csv = nonopen(&["models", "--format", "csv"]);
    assert!(String::from_utf8(csv.stdout)
        .unwrap()
        .starts_with("model,gauge,"));
}

#[test]
fn nonopen_table_reaches_the_gamma_root() {
    let out = nonopen(&["nonopen", "--model", "l2_weighted", "--n-max", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let gamma10 = v["rows"][9]["gamma"].as_f64().unwrap();
    assert!((gamma10 - 5.05).abs() < 0.01, "{gamma10}");
    assert_eq!(v["summary"]["all_satisfied"], Value::Bool(true));
}

#[test]
fn nonopen_writes_csv_to_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("table.csv");
    let out = nonopen(&[
        "nonopen",
        "--n-max",
        "5",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,gamma,sqrt_n,z_norm,inv_norm,satisfied");
    assert_eq!(lines.len(), 6);
}

#[test]
fn eval_solve_and_invert_from_files() {
    let dir = TempDir::new().unwrap();
    let x = write(
        dir.path(),
        "x.json",
        r#"{"kind": "sparse", "entries": [[1, 0.5], [4, -0.25]]}"#,
    );
    let y = write(
        dir.path(),
        "y.json",
        r#"{"kind": "sparse", "entries": [[2, 1.0]]}"#,
    );

    let out = nonopen(&["eval", "--x", &x, "--h", &y]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let g = 0.25 + 0.0625 / 4.0;
    assert!((v["gauge"].as_f64().unwrap() - g).abs() < 1e-15);
    assert!(v["derivative"].is_object());

    let out = nonopen(&["solve", "--x", &x, "--y", &y]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["within_tolerance"], Value::Bool(true));
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["log_scale"].as_f64(), Some(0.0));

    let out = nonopen(&["invert", "--y", &y]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["residual"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn certify_accepts_and_rejects() {
    let dir = TempDir::new().unwrap();
    // |||e_100||| = 1/10 under the 1/k weights
    let y = write(
        dir.path(),
        "y.json",
        r#"{"kind": "sparse", "entries": [[100, 1.0]]}"#,
    );
    let out = nonopen(&["certify", "--delta", "0.2", "--y", &y]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["certificate"]["certified"], Value::Bool(true));
    assert!(v["preimage_norm"].as_f64().unwrap() >= 1.0);

    let out = nonopen(&["certify", "--delta", "1.5", "--y", &y]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(
        nonopen(&["nonopen", "--model", "lp_seq", "--p", "4", "--q", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nonopen(&["nonopen", "--gauge", "lq_even", "--q", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nonopen(&["nonopen", "--model", "nowhere"]).status.code(),
        Some(2)
    );
    assert_eq!(
        nonopen(&["gradcheck", "--format", "csv"]).status.code(),
        Some(2)
    );
    assert_eq!(nonopen(&["nonopen", "--n-max", "0"]).status.code(), Some(2));
    assert_eq!(
        nonopen(&["eval", "--x", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn property_failures_exit_with_one() {
    let out = nonopen(&["gradcheck", "--samples", "3", "--tol", "1e-16"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], Value::Bool(false));
}

#[test]
fn config_file_and_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        dir.path(),
        "run.json",
        r#"{"model": {"kind": "lp_seq", "p": 2.0}, "gauge": {"gauge": "lq_even", "q": 4}, "seed": 5, "samples": 4}"#,
    );
    let out = nonopen(&["report", "--config", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["gauge"]["power"], 1);

    let out = nonopen(&["report", "--config", &cfg, "--seed", "9"]);
    assert_eq!(json(&out)["config"]["seed"], 9);

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"model": {"kind": "l2_weighted"}, "gauge": {"gauge": "weighted_l2"}, "extra": 1}"#,
    );
    assert_eq!(
        nonopen(&["report", "--config", &bad]).status.code(),
        Some(2)
    );
}

#[test]
fn exponent_flag_selects_power() {
    let out = nonopen(&["nonopen", "--s", "4", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["s"].as_f64(), Some(4.0));
    assert_eq!(nonopen(&["nonopen", "--s", "3"]).status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "gradcheck",
        "--model",
        "lp_seq",
        "--q",
        "6",
        "--p",
        "3",
        "--samples",
        "10",
        "--seed",
        "42",
    ];
    let a = nonopen(&args);
    let b = nonopen(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = nonopen(&[
        "gradcheck",
        "--model",
        "lp_seq",
        "--q",
        "6",
        "--p",
        "3",
        "--samples",
        "10",
        "--seed",
        "43",
    ]);
    assert_ne!(a.stdout, c.stdout);
}
