use std::process::{Command, Output};

use serde_json::Value;

fn cliffpde(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffpde"))
        .args(args)
        .env("CLIFFPDE_THREADS", "1")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn without_timestamp(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn dims_reports_space_sizes() {
    let out = cliffpde(&["dims", "--m", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["dim_Hk"], 5);
    assert_eq!(v["rank_Mk"], 3);
    assert_eq!(v["rank_Mk_minus_1"], 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(cliffpde(&["dims", "--m", "3"]).status.code(), Some(2));
    assert_eq!(cliffpde(&["dims", "--m", "2", "--k", "1"]).status.code(), Some(2));
    assert_eq!(cliffpde(&["verify", "--bogus"]).status.code(), Some(2));
    assert_eq!(cliffpde(&["verify", "--suite", "nope", "--m", "3", "--k", "1"]).status.code(), Some(2));
    assert_eq!(cliffpde(&["--help"]).status.code(), Some(0));
}

#[test]
fn verify_is_deterministic_for_a_seed() {
    let args = ["verify", "--suite", "all", "--m", "3", "--k", "1", "--seed", "11"];
    let a = cliffpde(&args);
    let b = cliffpde(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timestamp(json(&a)), without_timestamp(json(&b)));
    assert_eq!(json(&a)["pass"], true);
    let stderr = String::from_utf8_lossy(&a.stderr);
    assert!(stderr.lines().filter(|l| l.ends_with("PASS")).count() >= 6, "{stderr}");
}

#[test]
fn verify_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = cliffpde(&[
        "verify", "--suite", "maxwell", "--m", "4", "--k", "1", "--json", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["schema"], 1);
    assert_eq!(written["command"], "verify");
    assert_eq!(without_timestamp(written), without_timestamp(json(&out)));
    // only the target file remains, no temporaries
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn kernel_emits_exact_polynomial() {
    let out = cliffpde(&["kernel", "--m", "3", "--k", "1", "--emit", "zk"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kernel"]["kind"], "ZONAL");
    assert_eq!(v["kernel"]["omega_pow"], -1);
    assert_eq!(v["kernel"]["poly"]["terms"].as_array().unwrap().len(), 3);
}

#[test]
fn kernel_calibration_in_dimension_four_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("cal.json");
    let out = cliffpde(&[
        "kernel", "--m", "4", "--k", "1", "--calibrate", "--calibration", store.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibration"));
    assert!(!store.exists());
}

#[test]
fn poisson_solves_and_checks_residual() {
    let out = cliffpde(&[
        "poisson",
        "--m",
        "3",
        "--k",
        "1",
        "--bump",
        "0,0,0;1;4",
        "--c",
        "0.0795774715459477",
        "--direction-degree",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["field"]["residual"]["relative"].as_f64().unwrap() < 0.05);
    assert_eq!(v["field"]["points"].as_array().unwrap().len(), 5);
}

#[test]
fn poisson_without_constant_reports_missing_calibration() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("none.json");
    let out = cliffpde(&[
        "poisson", "--m", "3", "--k", "1", "--bump", "0,0,0;1;4", "--calibration", store.to_str().unwrap(),
    ]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("calibrat"));
}

#[test]
fn rule_reports_nodes_on_sphere() {
    let out = cliffpde(&["rule", "--m", "4", "--degree", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for p in v["rule"]["nodes"].as_array().unwrap() {
        let r: f64 = p.as_array().unwrap().iter().map(|c| c.as_f64().unwrap().powi(2)).sum();
        assert!((r - 1.0).abs() < 1e-12);
    }
}
