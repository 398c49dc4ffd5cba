use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn steane(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steane"))
        .args(args)
        .env_remove("STEANE_THREADS")
        .output()
        .expect("spawn steane")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn shor_json_is_byte_identical_across_runs_and_threads() {
    let a = steane(&["shor", "--verifications", "1"]);
    let b = steane(&["shor", "--verifications", "1", "--threads", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["label"], "shor_v1");
    assert!(v["fidelity"].is_array() || v["fidelity"].is_object());
}

#[test]
fn threads_env_fallback() {
    let out = Command::new(env!("CARGO_BIN_EXE_steane"))
        .args(["shor", "--verifications", "0"])
        .env("STEANE_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(out.stdout, steane(&["shor", "--verifications", "0"]).stdout);

    let bad = Command::new(env!("CARGO_BIN_EXE_steane"))
        .args(["shor", "--verifications", "0"])
        .env("STEANE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["shor", "--verifications", "3"][..],
        &["encode", "--method", "magic"],
        &["encode"],
        &["sweep"],
        &["frobnicate"],
        &["shor", "--verifications", "0", "--format", "xml"],
    ] {
        assert_eq!(steane(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unreadable_input_exits_2() {
    let out = steane(&["sweep", "--input", "/nonexistent/result.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("gates.json");
    let written = steane(&["encode", "--method", "gates", "--out", path(&file)]);
    assert!(written.status.success());
    assert!(written.stdout.is_empty());
    let printed = steane(&["encode", "--method", "gates"]);
    assert_eq!(std::fs::read(&file).unwrap(), printed.stdout);
}

#[test]
fn csv_format() {
    let out = steane(&["shor", "--verifications", "0", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("label,target,polynomial,ex,ey,ez,num,den"));
    assert!(lines.any(|l| l == "shor_v0,ghz4,fidelity,1,0,0,-6,1"), "{text}");
}

#[test]
fn sweep_reads_saved_result() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("shor0.json");
    assert!(steane(&["shor", "--verifications", "0", "--out", path(&file)]).status.success());
    let out = steane(&["sweep", "--input", path(&file), "--level", "0.99"]);
    assert!(out.status.success());
    let v = json(&out);
    let r = v["uniform"].as_f64().unwrap();
    assert!((r - 5.5819e-4).abs() < 1e-8, "{r}");
    assert!(!v["contour"].as_array().unwrap().is_empty());
}

#[test]
fn arbitrate_saved_result_with_dense_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("shor2.json");
    assert!(steane(&["shor", "--verifications", "2", "--out", path(&file)]).status.success());
    let out = steane(&["arbitrate", "--input", path(&file)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["oracle"], "dense");
    assert_eq!(v[0]["pass"], true);
}

#[test]
fn arbitrate_flags_tampered_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("gates.json");
    let out = steane(&["encode", "--method", "gates", "--ec", "perfect", "--out", path(&file)]);
    assert!(out.status.success());
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    let single = v["single"].clone();
    let mut tampered = single.clone();
    let text = serde_json::to_string(&tampered["fidelity"]).unwrap();
    tampered["fidelity"] = serde_json::from_str(&text.replace("-53", "-52")).unwrap();
    assert_ne!(tampered, single);
    v = Value::Array(vec![tampered]);
    std::fs::write(&file, serde_json::to_string(&v).unwrap()).unwrap();
    let out = steane(&["arbitrate", "--input", path(&file), "--oracle", "jet"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn golden_suite_passes_bundled_and_fails_on_mismatch() {
    let ok = steane(&["paper-suite"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let rows = json(&ok);
    assert!(rows.as_array().unwrap().iter().all(|r| r["status"] != "mismatch"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("golden.json");
    std::fs::write(
        &file,
        r#"{"degree":2,"entries":[{"name":"shor_0.fidelity","published":"1 - 5*px"}]}"#,
    )
    .unwrap();
    let bad = steane(&["paper-suite", "--golden", path(&file)]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)[0]["status"], "mismatch");
}
