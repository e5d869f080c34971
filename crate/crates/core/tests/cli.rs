use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracdiff(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(args)
        .output()
        .expect("run fracdiff")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("error JSON on stderr")
}

const HEAT: &str = r#"{"alpha": 2, "beta": 1, "domain": {"interval": [0, 3.141592653589793]},
  "initial_condition": "sin", "times": [0.3], "points": [[1.5707963267948966]], "n_paths": 0}"#;

#[test]
fn ml_prints_value_and_method() {
    let out = fracdiff(&["ml", "0.5", "-1"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.42758357615580705).abs() < 1e-14);
    assert!(v["method"].is_string());
}

#[test]
fn solve_writes_the_heat_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), HEAT);
    let out = fracdiff(&["solve", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("t,x,u_spectral,u_subordination,u_mc,mc_se,trunc_bound")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let u: f64 = row[2].parse().unwrap();
    assert!((u - (-0.3f64).exp()).abs() < 1e-9);
    assert_eq!(row[4], "nan");
}

#[test]
fn point_outside_domain_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &HEAT.replace("[[1.5707963267948966]]", "[[4.0]]"));
    let out = fracdiff(&["solve", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "point_outside_domain");
}

#[test]
fn unreadable_config_is_a_config_error() {
    let out = fracdiff(&["solve", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "config_error");
}

#[test]
fn insufficient_truncation_is_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{"alpha": 1, "beta": 0.5, "domain": {"interval": [-1, 1]}, "initial_condition": "bump",
      "times": [0.01], "points": [[0.0]], "n_paths": 0, "mesh_size": 128, "n_modes": 8}"#;
    let out = fracdiff(&["solve", &write_config(dir.path(), body)]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "truncation_insufficient");
}

#[test]
fn print_config_is_a_valid_config() {
    let out = fracdiff(&["--print-config"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"dt\": null"));
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["n_paths"] = Value::from(0);
    v["n_modes"] = Value::from(16);
    v["mesh_size"] = Value::from(128);
    let cfg = write_config(dir.path(), &v.to_string());
    let out = fracdiff(&["solve", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn eigs_mc_and_residual_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let eig = dir.path().join("eig.json");
    let rec = dir.path().join("paths.bin");
    let body = format!(
        r#"{{"alpha": 1.5, "beta": 0.8, "domain": {{"interval": [-1, 1]}}, "initial_condition": "psi_1",
        "times": [0.5], "points": [[0.0], [0.5]], "n_paths": 200, "mesh_size": 128, "n_modes": 8,
        "eigensystem_path": "{}", "records_path": "{}", "mc_bias": true}}"#,
        eig.display(),
        rec.display()
    );
    let cfg = write_config(dir.path(), &body);
    let out = fracdiff(&["eigs", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(summary["n_modes"], 8);
    assert!(eig.exists());

    let out = fracdiff(&["mc", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert!(rows[0]["bias"]["bias"].as_f64().unwrap() >= 0.0);
    assert_eq!(std::fs::metadata(&rec).unwrap().len(), 2 * 200 * 17);

    let out = fracdiff(&["residual", &cfg]);
    assert!(out.status.success());
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["modes"][0]["relative"].as_f64().unwrap() < 5e-3);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_fracdiff"))
        .args(["ml", "0.5", "-1"])
        .env("FRACDIFF_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

fn failing_checks(stdout: &[u8]) -> Vec<u8> {
    String::from_utf8_lossy(stdout)
        .lines()
        .filter(|l| l.starts_with("criterion") && l.contains(" FAIL "))
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn verify_fast_and_fault_injection() {
    let clean = fracdiff(&["verify", "--fast"]);
    // the eigenfunction sup-ratio criterion cannot hold in one dimension
    assert_eq!(failing_checks(&clean.stdout), vec![9]);
    assert_eq!(clean.status.code(), Some(1));

    let faulty = fracdiff(&["verify", "--fast", "--inject-fault"]);
    assert_eq!(faulty.status.code(), Some(1));
    assert!(failing_checks(&faulty.stdout).contains(&2));
}
