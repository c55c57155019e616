//! Artifact writers: spectrum CSVs, plot CSVs and JSON summaries.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::constants::ConstantsReport;
use super::fit::WeylFitResult;
use super::{ExperimentError, Result};

/// Outcome of one acceptance check: `pass` iff `value <= tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: bool,
    pub value: f64,
    pub tolerance: f64,
    /// Disabled checks are reported but do not affect the exit code.
    pub enabled: bool,
}

impl CheckResult {
    pub fn at_most(value: f64, tolerance: f64, enabled: bool) -> Self {
        Self { pass: value <= tolerance, value, tolerance, enabled }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: ExperimentConfig,
    pub spectra: Vec<PathBuf>,
    pub fits: Vec<WeylFitResult>,
    pub constants: ConstantsReport,
    pub checks: BTreeMap<String, CheckResult>,
    /// Experiment-specific diagnostics.
    pub details: serde_json::Value,
}

impl RunSummary {
    pub fn all_enabled_pass(&self) -> bool {
        self.checks.values().all(|c| !c.enabled || c.pass)
    }

    /// 0 when every enabled check passes, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_enabled_pass() {
            0
        } else {
            2
        }
    }
}

/// Writes `bytes` to a sibling temporary file and renames it over `path`.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let mut f = std::fs::File::create(&tmp).map_err(|e| ExperimentError::io(&tmp, e))?;
    f.write_all(bytes).and_then(|_| f.sync_all()).map_err(|e| ExperimentError::io(&tmp, e))?;
    drop(f);
    std::fs::rename(&tmp, path).map_err(|e| ExperimentError::io(path, e))
}

/// `j,s_j` with 1-based `j` and 17 significant digits.
pub fn spectrum_csv(values: &[f64]) -> String {
    let mut s = String::with_capacity(32 * (values.len() + 1));
    s.push_str("j,s_j\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{},{:.16e}", i + 1, v);
    }
    s
}

/// `j,s_j,s_j_jp` where the last column is `s_j j^p`.
pub fn plot_csv(values: &[f64], p: f64) -> String {
    let mut s = String::with_capacity(56 * (values.len() + 1));
    s.push_str("j,s_j,s_j_jp\n");
    for (i, v) in values.iter().enumerate() {
        let j = (i + 1) as f64;
        let _ = writeln!(s, "{},{:.16e},{:.16e}", i + 1, v, v * j.powf(p));
    }
    s
}

pub fn write_spectrum_csv(path: &Path, values: &[f64]) -> Result<()> {
    atomic_write(path, spectrum_csv(values).as_bytes())
}

pub fn write_plot_csv(path: &Path, values: &[f64], p: f64) -> Result<()> {
    atomic_write(path, plot_csv(values, p).as_bytes())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| ExperimentError::Compute(e.to_string()))?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

/// Parses a `j,s_j` CSV (header required, `j` must run 1, 2, ...).
pub fn parse_spectrum_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header.trim() != "j,s_j" && !header.trim().starts_with("j,s_j,") {
        return Err(ExperimentError::Config(format!("expected header `j,s_j`, got `{header}`")));
    }
    let mut out = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let j: usize = parts
            .next()
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| ExperimentError::Config(format!("line {}: bad index", k + 2)))?;
        let v: f64 = parts
            .next()
            .and_then(|t| t.trim().parse().ok())
            .ok_or_else(|| ExperimentError::Config(format!("line {}: bad value", k + 2)))?;
        if j != out.len() + 1 {
            return Err(ExperimentError::Config(format!("line {}: index {j} out of sequence", k + 2)));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn read_spectrum_csv(path: &Path) -> Result<Vec<f64>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?;
    parse_spectrum_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let v = vec![1.0, 0.1 + 0.2, 1e-300];
        let text = spectrum_csv(&v);
        assert!(text.starts_with("j,s_j\n1,1.0000000000000000e0\n"));
        assert!(!text.contains('\r'));
        assert_eq!(parse_spectrum_csv(&text).unwrap(), v);
    }

    #[test]
    fn csv_rejects_gaps() {
        assert!(parse_spectrum_csv("j,s_j\n1,1.0\n3,2.0\n").is_err());
        assert!(parse_spectrum_csv("x,y\n1,1.0\n").is_err());
    }

    #[test]
    fn plot_columns() {
        let t = plot_csv(&[0.5, 0.125], 2.0);
        assert_eq!(t.lines().nth(2).unwrap(), "2,1.2500000000000000e-1,5.0000000000000000e-1");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
