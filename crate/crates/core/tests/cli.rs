use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn slipmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slipmix"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn defaults() -> Value {
    let out = slipmix(&["--dump-defaults"]);
    assert_eq!(out.status.code(), Some(0));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write_config(dir: &Path, cfg: &Value) -> String {
    let p = dir.join("config.json");
    std::fs::write(&p, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn default_configuration_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = defaults();
    let path = write_config(dir.path(), &cfg);
    let out = slipmix(&["--config", &path, "classify"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "weak");
}

#[test]
fn closure_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = slipmix(&["validate-closures"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut cfg = defaults();
    cfg["physics"]["cv"] = serde_json::json!([1.5, 2.5]);
    let path = write_config(dir.path(), &cfg);
    assert_eq!(
        slipmix(&["--config", &path, "validate-closures"])
            .status
            .code(),
        Some(4)
    );
}

#[test]
fn invalid_configurations_exit_3_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out_arg = out_dir.to_str().unwrap();

    let mut cfg = defaults();
    cfg["schedule"]["start"]["eps"] = serde_json::json!(2.0);
    let path = write_config(dir.path(), &cfg);
    assert_eq!(
        slipmix(&["--config", &path, "--out", out_arg, "solve"])
            .status
            .code(),
        Some(3)
    );
    assert!(!out_dir.exists());

    let mut cfg = defaults();
    cfg["solver"]["unknown_knob"] = serde_json::json!(1);
    let path = write_config(dir.path(), &cfg);
    assert_eq!(
        slipmix(&["--config", &path, "--out", out_arg, "solve"])
            .status
            .code(),
        Some(3)
    );
    assert!(!out_dir.exists());

    assert_eq!(slipmix(&["solve", "--no-such-flag"]).status.code(), Some(3));
}

#[test]
fn solve_then_audit_and_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let r = slipmix(&["--out", out, "--reproducible", "solve"]);
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stderr)
    );
    for f in ["solution.csv", "diagnostics.csv", "summary.json"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["passes"], Value::Bool(true));
    assert_eq!(summary["regime"], "weak");

    let a = slipmix(&["--out", out, "audit"]);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert!(dir.path().join("audit.json").exists());
    let d = slipmix(&["--out", out, "diagnose"]);
    assert_eq!(
        d.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&d.stderr)
    );
    assert!(dir.path().join("diagnose.json").exists());
}

#[test]
fn reproducible_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let r = slipmix(&[
            "--out",
            d.path().to_str().unwrap(),
            "--reproducible",
            "--seed",
            "7",
            "solve",
        ]);
        assert_eq!(r.status.code(), Some(0));
    }
    for f in ["solution.csv", "diagnostics.csv", "summary.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}
