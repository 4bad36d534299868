use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fusewave::io::{generators_to_json, load_generators};
use fusewave::spectral::CircleGrid;
use fusewave::Mra;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fusewave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const OVERLAP: &str = r#"[{"pieces": [[0, 0.75, 1, 0]]}, {"pieces": [[0.25, 1, 1, 0]]}]"#;

#[test]
fn build_haar_with_defaults() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["build", "--filter", "haar", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["used_half_shift_shortcut"], Value::Bool(true));
    assert_eq!(report["passed"], Value::Bool(true));

    let sets = fs::read_to_string(dir.path().join("sets.csv")).unwrap();
    let mut lines = sets.lines();
    assert_eq!(lines.next(), Some("xi,in_E,in_F,f,g"));
    let mut rows = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let f: f64 = cols[3].parse().unwrap();
        assert!((f - std::f64::consts::SQRT_2).abs() <= 1e-14, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 1024);
    let spectrum = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(spectrum.starts_with("xi,re_psi_hat,im_psi_hat\n"));
    assert_eq!(spectrum.lines().count(), 1 + 1024 * 128);
}

#[test]
fn build_db2_passes() {
    let dir = TempDir::new().unwrap();
    let o = run(&["build", "--filter", "db2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    for key in [
        "periodization_residual",
        "v0_orthogonality_residual",
        "v1_membership_residual",
        "translate_gram_residual",
    ] {
        assert!(r[key].as_f64().unwrap() <= 1e-6, "{key}");
    }
}

#[test]
fn missing_filter_file_is_an_input_error() {
    let o = run(&["build", "--filter", "file:missing.json", "--grid-n", "64"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["status"], "input_error");
}

#[test]
fn invalid_flags_are_input_errors() {
    assert_eq!(run(&["build", "--grid-n", "1000"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--tol", "1e-6,1e-6"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn filter_file_that_fails_validation_is_a_precondition_violation() {
    let dir = TempDir::new().unwrap();
    let path = write(dir.path(), "bad.json", r#"{"coeffs": [[1, 0], [0, 0]]}"#);
    let o = run(&["build", "--filter", &format!("file:{path}"), "--grid-n", "64", "--periods", "8"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["status"], "precondition_violation");
}

#[test]
fn diagnose_and_tighten_round_trip() {
    let dir = TempDir::new().unwrap();
    let gens = write(dir.path(), "gens.json", OVERLAP);
    let out = dir.path().join("out");
    let o = run(&["diagnose", &gens, "--periods", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let d = stdout_json(&o);
    assert!((d["A"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!((d["B"].as_f64().unwrap() - 2.0).abs() <= 1e-12);

    let o = run(&["diagnose", &gens, "--periods", "2", "--tighten", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let tightened = out.join("tightened.json");
    let o = run(&["diagnose", tightened.to_str().unwrap(), "--periods", "2"]);
    let d = stdout_json(&o);
    assert!((d["A"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!((d["B"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert_eq!(d["is_normalized_tight"], Value::Bool(true));

    let text = fs::read_to_string(&tightened).unwrap();
    let grid = CircleGrid::new(1024).unwrap();
    let parsed = load_generators(&tightened, &Mra::Shannon, grid, 2).unwrap();
    assert_eq!(generators_to_json(&parsed).unwrap(), text);
}

#[test]
fn zero_generator_is_a_precondition_violation() {
    let dir = TempDir::new().unwrap();
    let gens = write(dir.path(), "zero.json", r#"[{"pieces": []}]"#);
    let o = run(&["diagnose", &gens, "--periods", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout_json(&o)["status"], "precondition_violation");
}

#[test]
fn fuse_demo_cases() {
    let dir = TempDir::new().unwrap();
    let gens = write(dir.path(), "gens.json", OVERLAP);
    let o = run(&["fuse-demo", &gens, "0", "1", "--periods", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_eq!(r["within [A/2, 2B]"], Value::Bool(true));
    assert_eq!(r["after"]["A"].as_f64(), Some(1.0));
    assert_eq!(r["after"]["B"].as_f64(), Some(1.0));

    let slots = write(dir.path(), "slots.json", r#"[{"pieces": [[0, 1, 1, 0]]}, {"pieces": [[1, 2, 1, 0]]}]"#);
    let o = run(&["fuse-demo", &slots, "0", "1", "--periods", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!((stdout_json(&o)["violating_measure"].as_f64().unwrap() - 1.0).abs() <= 1e-12);

    let same = r#"[{"pieces": [[0, 0.5, 1, 2]]}, {"pieces": [[0, 0.5, 1, 2]]}]"#;
    let same = write(dir.path(), "same.json", same);
    let out = dir.path().join("fused");
    let o = run(&["fuse-demo", &same, "0", "1", "--periods", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let fused: Value = serde_json::from_str(&fs::read_to_string(out.join("fused.json")).unwrap()).unwrap();
    assert_eq!(fused, serde_json::json!([{"pieces": [[0.0, 0.5, 1.0, 2.0]]}]));
}

#[test]
fn minimal_complement_command() {
    let dir = TempDir::new().unwrap();
    let w = write(dir.path(), "w.json", r#"[{"pieces": [[0, 1, 1, 0]]}, {"pieces": [[1, 2, 1, 0]]}]"#);
    let y = write(dir.path(), "y.json", r#"[{"pieces": [[0, 1, 1, 0]]}]"#);
    let o = run(&["complement", &w, "--subspace", &y, "--minimal", "--periods", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["k"], 1);
}

#[test]
fn repeated_runs_write_identical_files() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let o = run(&[
            "build", "--filter", "db4", "--grid-n", "256", "--periods", "16", "--emit-time-samples", "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(matches!(o.status.code(), Some(0 | 1)));
    }
    for name in ["spectrum.csv", "sets.csv", "time_samples.csv", "report.json"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs between runs");
    }
}
