//! End-to-end runner behaviour: artifacts, exit codes, determinism, batches.

use std::f64::consts::PI;

use zaremba_core::experiments::report::{parse_spectrum_csv, read_spectrum_csv, spectrum_csv};
use zaremba_core::experiments::runner::{exit_code, run_batch};
use zaremba_core::experiments::{
    composed_prediction, constants, run_experiment, weyl_fit_values, ExperimentConfig, ExperimentKind, FitOptions,
    JumpFunction, SymbolFactor,
};

#[test]
fn constants_run_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig::from_json(r#"{"experiment": "constants"}"#).unwrap();
    let s = run_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(s.exit_code(), 0);
    assert!((s.constants.c_n - 0.225_079_079_039_276_6).abs() < 1e-12);
    let text = std::fs::read_to_string(dir.path().join("summary.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["constants"]["C0_plus"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["checks"]["C_A"]["pass"], true);
}

#[test]
fn disc_run_is_deterministic() {
    let cfg = ExperimentConfig::from_json(r#"{"experiment": "disc", "grid_n": 128, "routes": ["a", "b"]}"#).unwrap();
    let (d1, d2) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let s1 = run_experiment(&cfg, d1.path()).unwrap();
    run_experiment(&cfg, d2.path()).unwrap();
    assert_eq!(s1.spectra.len(), 2);
    for p in &s1.spectra {
        let name = p.file_name().unwrap();
        let a = std::fs::read(d1.path().join(name)).unwrap();
        let b = std::fs::read(d2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name:?}");
        assert!(a.starts_with(b"j,s_j\n"));
        assert!(!a.contains(&b'\r'));
    }
    assert!(s1.checks.contains_key("weyl_a") && s1.checks.contains_key("weyl_b"));
}

#[test]
fn malformed_configs_exit_three() {
    for text in [
        "{",
        r#"{"experiment": "nope"}"#,
        r#"{"experiment": "disc", "grid_n": 100}"#,
        r#"{"experiment": "disc", "unknown_key": 1}"#,
        r#"{"experiment": "fem", "n_r": 2}"#,
        r#"{"experiment": "disc", "fit_window": [0.5, 0.1]}"#,
    ] {
        let r = ExperimentConfig::from_json(text);
        let e = r.expect_err(text);
        assert_eq!(e.exit_code(), 3, "{text}: {e}");
    }
}

#[test]
fn failing_enabled_check_exits_two() {
    // A wildly wrong fit exponent makes the Weyl check fail.
    let cfg = ExperimentConfig::from_json(r#"{"experiment": "disc", "grid_n": 128, "fit_exponent": 1.0}"#).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let r = run_experiment(&cfg, dir.path());
    assert_eq!(exit_code(&r), 2);
    let cfg = ExperimentConfig::from_json(
        r#"{"experiment": "disc", "grid_n": 128, "fit_exponent": 1.0, "checks": {"weyl_b": false}}"#,
    )
    .unwrap();
    assert_eq!(exit_code(&run_experiment(&cfg, dir.path())), 0);
}

#[test]
fn composed_diagonal_run() {
    let cfg = ExperimentConfig::from_json(
        r#"{"experiment": "composed", "grid_n": 1024,
            "factors": [{"order": 1.0}],
            "multipliers": [{"kind": "constant", "value": 1.0}, {"kind": "constant", "value": 1.0}]}"#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let s = run_experiment(&cfg, dir.path()).unwrap();
    assert_eq!(s.exit_code(), 0, "{:?}", s.checks);
    let v = read_spectrum_csv(&s.spectra[0]).unwrap();
    assert_eq!(v.len(), 1024);
}

#[test]
fn composed_and_constants_share_the_arc_prediction() {
    let half = JumpFunction::arc(0.0, PI, 1.0).unwrap();
    let one = JumpFunction::constant(1.0);
    let k = 0.5f64.sqrt();
    let factors = [
        SymbolFactor { order: 0.5, coeff: k },
        SymbolFactor { order: 1.0, coeff: 1.0 },
        SymbolFactor { order: 0.5, coeff: k },
    ];
    let composed = composed_prediction(&factors, &[half.clone(), one.clone(), one, half]).unwrap();
    let c = constants(2, PI, 2.0 * PI, PI).unwrap();
    assert!((composed - c.predicted_mixed()).abs() < 1e-12, "{composed} vs {}", c.predicted_mixed());
}

#[test]
fn batch_matches_sequential() {
    let root = tempfile::tempdir().unwrap();
    let jobs: Vec<_> = [PI / 2.0, PI, 1.5 * PI]
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut c = ExperimentConfig::new(ExperimentKind::Disc);
            c.grid_n = Some(128);
            c.theta_plus = Some(t);
            (c, root.path().join(format!("job{i}")))
        })
        .collect();
    let par = run_batch(&jobs, 3);
    let seq_root = tempfile::tempdir().unwrap();
    let seq_jobs: Vec<_> =
        jobs.iter().enumerate().map(|(i, (c, _))| (c.clone(), seq_root.path().join(format!("job{i}")))).collect();
    let seq = run_batch(&seq_jobs, 1);
    for (p, s) in par.iter().zip(&seq) {
        let (p, s) = (p.as_ref().unwrap(), s.as_ref().unwrap());
        assert_eq!(p.fits, s.fits);
        assert_eq!(read_spectrum_csv(&p.spectra[0]).unwrap(), read_spectrum_csv(&s.spectra[0]).unwrap());
    }
}

#[test]
fn spectrum_csv_round_trip_and_fit() {
    let values: Vec<f64> = (1..=400).map(|j| 0.5 / (j * j) as f64 + 3.0 / (j * j * j) as f64).collect();
    let text = spectrum_csv(&values);
    assert_eq!(parse_spectrum_csv(&text).unwrap(), values);
    let opts = FitOptions { order: 1, correction_exponent: 1.0 };
    let f = weyl_fit_values(&values, 0.0, 2.0, (20, 100), opts).unwrap();
    assert!((f.extrapolated - 0.5).abs() < 1e-6, "{}", f.extrapolated);
    assert!((f.raw - 0.5).abs() > (f.extrapolated - 0.5).abs());
    assert!(parse_spectrum_csv("j,x\n1,2\n").is_err());
    assert!(parse_spectrum_csv("j,s_j\n2,1.0\n").is_err());
}
