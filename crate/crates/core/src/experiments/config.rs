//! JSON experiment configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::composed::{JumpFunction, SymbolFactor};
use super::fit::{FitOptions, DEFAULT_CORRECTION};
use super::{ExperimentError, Result};
use crate::femlab::Geometry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Constants,
    Halfline,
    Disc,
    Fem,
    Compare,
    Composed,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Constants => "constants",
            Self::Halfline => "halfline",
            Self::Disc => "disc",
            Self::Fem => "fem",
            Self::Compare => "compare",
            Self::Composed => "composed",
        }
    }
}

/// Spectrum routes of the disc experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// `P₁,₊^{1/2} L⁻¹ P₁,₊^{1/2}`
    A,
    /// `P₂,₊ L⁻¹ P₂,₊`
    B,
    /// Neumann-reference formula.
    Neumann,
    /// Untruncated diagonal spectrum `q_m / (b - p_m)`.
    ClosedForm,
}

impl Route {
    pub fn name(&self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::Neumann => "neumann",
            Self::ClosedForm => "closed_form",
        }
    }
}

/// Piecewise-constant multiplier in a composed experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", deny_unknown_fields)]
pub enum MultiplierSpec {
    Constant { value: f64 },
    Arc { start: f64, length: f64, value: f64 },
    Pieces { breaks: Vec<f64>, values: Vec<f64> },
}

impl MultiplierSpec {
    pub fn build(&self) -> Result<JumpFunction> {
        match self {
            Self::Constant { value } => Ok(JumpFunction::constant(*value)),
            Self::Arc { start, length, value } => JumpFunction::arc(*start, *length, *value),
            Self::Pieces { breaks, values } => JumpFunction::new(breaks.clone(), values.clone()),
        }
    }
}

/// Experiment configuration; every field but `experiment` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<Geometry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_theta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolation_order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<Vec<Route>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<SymbolFactor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<Vec<MultiplierSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub checks: BTreeMap<String, bool>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            alpha: None,
            b: None,
            theta_plus: None,
            grid_n: None,
            extent: None,
            shift_k: None,
            geometry: None,
            n_r: None,
            n_theta: None,
            fit_window: None,
            fit_exponent: None,
            extrapolation_order: None,
            correction_exponent: None,
            routes: None,
            factors: None,
            multipliers: None,
            out_dir: None,
            checks: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }

    pub fn b(&self) -> f64 {
        self.b.unwrap_or(0.0)
    }

    pub fn theta_plus(&self) -> f64 {
        self.theta_plus.unwrap_or(PI)
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n.unwrap_or(match self.experiment {
            ExperimentKind::Halfline => 4096,
            ExperimentKind::Composed => 2048,
            _ => 1024,
        })
    }

    pub fn extent(&self) -> f64 {
        self.extent.unwrap_or(20.0)
    }

    pub fn shift_k(&self) -> f64 {
        self.shift_k.unwrap_or(0.2)
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry.unwrap_or(Geometry::Disc)
    }

    pub fn n_r(&self) -> usize {
        self.n_r.unwrap_or(32)
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta.unwrap_or(64)
    }

    /// Fit window as fractions of `grid_n`.
    pub fn fit_window(&self) -> [f64; 2] {
        self.fit_window.unwrap_or([1.0 / 32.0, 1.0 / 8.0])
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            order: self.extrapolation_order.unwrap_or(1),
            correction_exponent: self.correction_exponent.unwrap_or(DEFAULT_CORRECTION),
        }
    }

    pub fn routes(&self) -> Vec<Route> {
        self.routes.clone().unwrap_or_else(|| vec![Route::B])
    }

    /// Whether check `name` is enabled; unlisted checks use `default`.
    pub fn check_enabled(&self, name: &str, default: bool) -> bool {
        self.checks.get(name).copied().unwrap_or(default)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        for (name, v) in [
            ("alpha", self.alpha),
            ("b", self.b),
            ("theta_plus", self.theta_plus),
            ("extent", self.extent),
            ("shift_k", self.shift_k),
            ("fit_exponent", self.fit_exponent),
            ("correction_exponent", self.correction_exponent),
        ] {
            if let Some(v) = v {
                if !v.is_finite() {
                    return bad(format!("{name} must be finite"));
                }
            }
        }
        if self.alpha() <= 0.0 {
            return bad(format!("alpha = {} must be positive", self.alpha()));
        }
        let t = self.theta_plus();
        if !(t > 0.0 && t <= 2.0 * PI + 1e-12) {
            return bad(format!("theta_plus = {t} outside (0, 2π]"));
        }
        if self.extent() <= 0.0 {
            return bad("extent must be positive".into());
        }
        if let Some(n) = self.grid_n {
            if !n.is_power_of_two() || n < 16 {
                return bad(format!("grid_n = {n} must be a power of two >= 16"));
            }
        }
        if let Some([a, b]) = self.fit_window {
            if !(a > 0.0 && a < b && b <= 1.0) {
                return bad(format!("fit_window [{a}, {b}] must satisfy 0 < lo < hi <= 1"));
            }
        }
        if self.n_r() < 4 || self.n_theta() < 8 {
            return bad(format!("mesh {}x{} below the 4x8 minimum", self.n_r(), self.n_theta()));
        }
        if let Some(q) = self.correction_exponent {
            if q <= 0.0 {
                return bad("correction_exponent must be positive".into());
            }
        }
        if self.experiment == ExperimentKind::Composed {
            let l = self.factors.as_ref().map_or(0, Vec::len);
            if l == 0 {
                return bad("composed experiment needs `factors`".into());
            }
            let m = self.multipliers.as_ref().map_or(0, Vec::len);
            if m != l + 1 {
                return bad(format!("composed experiment needs {} multipliers, got {m}", l + 1));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_defaults() {
        let c = ExperimentConfig::from_json(r#"{"experiment": "constants"}"#).unwrap();
        assert_eq!(c.alpha(), 1.0);
        assert_eq!(c.theta_plus(), PI);
        assert!(c.check_enabled("anything", true));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "disc", "grid": 3}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "nope"}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "disc", "alpha": -1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "disc", "grid_n": 1000}"#).is_err());
    }

    #[test]
    fn full_schema_parses() {
        let text = r#"{
            "experiment": "composed", "alpha": 1.0, "b": 0.0, "theta_plus": 3.14, "grid_n": 1024,
            "extent": 20.0, "shift_k": 0.2, "geometry": "half-disc", "n_r": 8, "n_theta": 16,
            "fit_window": [0.03, 0.12], "fit_exponent": 2.0, "routes": ["a", "b", "neumann", "closed_form"],
            "factors": [{"order": 1.0}], "multipliers": [{"kind": "constant", "value": 1.0},
            {"kind": "arc", "start": 0.0, "length": 3.14, "value": 1.0}],
            "out_dir": "out", "checks": {"composed": true}
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.geometry(), Geometry::HalfDisc);
        assert_eq!(c.routes().len(), 4);
    }
}
