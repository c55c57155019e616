//! Exit codes and artifacts of the `zaremba` binary.

use std::path::Path;
use std::process::{Command, Output};

fn zaremba(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zaremba")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constants_flags_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = zaremba(&["constants", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert!((v["constants"]["c_n"].as_f64().unwrap() - 0.225_079_079_039_276_6).abs() < 1e-12);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("disc.json");
    std::fs::write(&cfg, r#"{"experiment": "disc", "grid_n": 4096, "routes": ["a"]}"#).unwrap();
    let out = dir.path().join("out");
    let o = zaremba(&["disc", "--config", path(&cfg), "--grid-n", "128", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("disc_a_spectrum.csv")).unwrap();
    assert!(text.starts_with("j,s_j\n"));
    assert_eq!(text.lines().count(), 1 + 64);
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let wrong_kind = dir.path().join("kind.json");
    std::fs::write(&wrong_kind, r#"{"experiment": "fem"}"#).unwrap();
    for args in [
        vec!["disc", "--config", path(&bad)],
        vec!["disc", "--config", path(&wrong_kind)],
        vec!["disc", "--grid-n", "100"],
        vec!["disc", "--config", "/nonexistent/config.json"],
        vec!["frobnicate"],
        vec!["composed"],
        vec!["weyl-fit", "--input", path(&bad), "--window", "1,2"],
    ] {
        let o = zaremba(&args);
        assert_eq!(code(&o), 3, "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}: message on stderr");
    }
}

#[test]
fn failing_check_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = zaremba(&["disc", "--grid-n", "128", "--fit-exponent", "1", "--out", path(dir.path())]);
    assert_eq!(code(&o), 2);
    let o = zaremba(&[
        "disc",
        "--grid-n",
        "128",
        "--fit-exponent",
        "1",
        "--check",
        "weyl_b=false",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn computation_error_exits_one() {
    // 64x128 has more nodes than the dense resolvent-difference budget.
    let dir = tempfile::tempdir().unwrap();
    let o = zaremba(&["compare", "--grid-n", "64", "--n-r", "64", "--n-theta", "128", "--out", path(dir.path())]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn weyl_fit_on_written_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let mut text = String::from("j,s_j\n");
    for j in 1..=200u32 {
        text.push_str(&format!("{j},{:.17e}\n", 2.0 / f64::from(j * j)));
    }
    std::fs::write(&csv, text).unwrap();
    let out = dir.path().join("fit.json");
    let o = zaremba(&["weyl-fit", "--input", path(&csv), "--window", "10,50", "--predicted", "2", "--out", path(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["raw"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let o = zaremba(&["weyl-fit", "--input", path(&csv), "--window", "10,50", "--predicted", "3"]);
    assert_eq!(code(&o), 2);
    let o = zaremba(&["weyl-fit", "--input", path(&csv), "--window", "10,500"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn composed_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = zaremba(&[
        "composed",
        "--grid-n",
        "512",
        "--factor",
        "1",
        "--multiplier",
        "const:1",
        "--multiplier",
        "const:1",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("composed_spectrum.csv").exists());
}

#[test]
fn fem_mesh_export() {
    let dir = tempfile::tempdir().unwrap();
    let o = zaremba(&[
        "fem",
        "--geometry",
        "half-disc",
        "--n-r",
        "8",
        "--n-theta",
        "16",
        "--export-mesh",
        "--out",
        path(dir.path()),
    ]);
    let c = code(&o);
    // 8x16 is too coarse for the 1% exact-eigenvalue check; only the artifacts matter here.
    assert!(c == 0 || c == 2, "{}", String::from_utf8_lossy(&o.stderr));
    let nodes = std::fs::read_to_string(dir.path().join("mesh.nodes")).unwrap();
    let tris = std::fs::read_to_string(dir.path().join("mesh.tri")).unwrap();
    assert_eq!(nodes.lines().count(), 1 + 8 * 17);
    let n = nodes.lines().count();
    for line in tris.lines() {
        let idx: Vec<usize> = line.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(idx.len(), 3);
        assert!(idx.iter().all(|&i| i < n));
    }
}

#[test]
fn batch_runs_each_config() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("first.json");
    let b = dir.path().join("second.json");
    std::fs::write(&a, r#"{"experiment": "constants"}"#).unwrap();
    std::fs::write(&b, r#"{"experiment": "disc", "grid_n": 128}"#).unwrap();
    let out = dir.path().join("out");
    let o = Command::new(env!("CARGO_BIN_EXE_zaremba"))
        .args(["batch", path(&a), path(&b), "--out", path(&out)])
        .env("ZAREMBA_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("first/summary.json").exists());
    assert!(out.join("second/disc_b_spectrum.csv").exists());
}
