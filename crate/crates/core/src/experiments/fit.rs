//! Weyl-constant fits `s_j j^p ≈ C + Σ_k D_k j^{-kq}`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result};
use crate::linalg::SingularSpectrum;

/// Default correction exponent `q`.
pub const DEFAULT_CORRECTION: f64 = 0.5;

/// Condition number above which a fit is flagged.
pub const ILL_CONDITIONED: f64 = 1e10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Number of correction terms (0 disables extrapolation).
    pub order: usize,
    pub correction_exponent: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { order: 1, correction_exponent: DEFAULT_CORRECTION }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylFitResult {
    pub exponent: f64,
    /// 1-based inclusive window.
    pub window: [usize; 2],
    /// Samples used after dropping values below the spectrum's fit floor.
    pub samples: usize,
    pub raw: f64,
    /// RMS deviation of `s_j j^p` from `raw`.
    pub raw_residual: f64,
    pub extrapolated: f64,
    /// `[C, D_1, ..]`
    pub coefficients: Vec<f64>,
    pub options: FitOptions,
    /// RMS residual of the least-squares model.
    pub model_residual: f64,
    /// Condition number of the column-scaled design matrix.
    pub condition: f64,
    pub ill_conditioned: bool,
    pub predicted: Option<f64>,
    /// `|extrapolated - predicted| / |predicted|`
    pub relative_error: Option<f64>,
    /// Set when a prediction is known and extrapolation is more than
    /// 10 times further from it than the raw mean (plus the model residual).
    pub extrapolation_suspect: bool,
}

impl WeylFitResult {
    /// Attaches a predicted limit and derives the error fields.
    pub fn with_prediction(mut self, predicted: f64) -> Self {
        self.predicted = Some(predicted);
        self.relative_error = Some((self.extrapolated - predicted).abs() / predicted.abs());
        self.extrapolation_suspect =
            (self.extrapolated - predicted).abs() > 10.0 * (self.raw - predicted).abs() + self.model_residual;
        self
    }
}

/// Fits on raw values `s_j`, `j = 1..`, over the 1-based window `[lo, hi]`.
pub fn weyl_fit_values(
    values: &[f64],
    floor: f64,
    exponent: f64,
    window: (usize, usize),
    options: FitOptions,
) -> Result<WeylFitResult> {
    let (lo, hi) = window;
    if lo == 0 || lo > hi || hi > values.len() {
        return Err(ExperimentError::Config(format!(
            "fit window [{lo}, {hi}] outside spectrum of length {}",
            values.len()
        )));
    }
    if !exponent.is_finite() || !(options.correction_exponent > 0.0) {
        return Err(ExperimentError::Config("fit exponents must be finite and q > 0".into()));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&j| values[j - 1] > floor)
        .map(|j| (j as f64, values[j - 1] * (j as f64).powf(exponent)))
        .collect();
    let cols = options.order + 1;
    if pts.is_empty() {
        return Err(ExperimentError::Config(format!("fit window [{lo}, {hi}] has no values above the floor")));
    }
    if pts.len() < cols {
        return Err(ExperimentError::Config(format!("fit window has {} samples, model needs {cols}", pts.len())));
    }
    let m = pts.len() as f64;
    let raw = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let raw_residual = (pts.iter().map(|p| (p.1 - raw).powi(2)).sum::<f64>() / m).sqrt();

    let mut a = DMatrix::from_fn(pts.len(), cols, |i, k| pts[i].0.powf(-(k as f64) * options.correction_exponent));
    let y = DVector::from_iterator(pts.len(), pts.iter().map(|p| p.1));
    let scales: Vec<f64> = (0..cols).map(|k| a.column(k).norm()).collect();
    for (k, s) in scales.iter().enumerate() {
        a.column_mut(k).scale_mut(1.0 / s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let sol = svd
        .solve(&y, smax * f64::EPSILON * cols as f64)
        .map_err(|e| ExperimentError::Compute(format!("least squares failed: {e}")))?;
    let model_residual = ((&a * &sol - &y).norm_squared() / m).sqrt();
    let coefficients: Vec<f64> = sol.iter().zip(&scales).map(|(c, s)| c / s).collect();
    let extrapolated = coefficients[0];
    if !extrapolated.is_finite() {
        return Err(ExperimentError::Compute("extrapolated fit is not finite".into()));
    }
    Ok(WeylFitResult {
        exponent,
        window: [lo, hi],
        samples: pts.len(),
        raw,
        raw_residual,
        extrapolated,
        coefficients,
        options,
        model_residual,
        condition,
        ill_conditioned: condition > ILL_CONDITIONED,
        predicted: None,
        relative_error: None,
        extrapolation_suspect: false,
    })
}

pub fn weyl_fit(
    spec: &SingularSpectrum,
    exponent: f64,
    window: (usize, usize),
    options: FitOptions,
) -> Result<WeylFitResult> {
    weyl_fit_values(spec.values(), spec.fit_floor(), exponent, window, options)
}

/// Window `[⌈lo_frac·n⌉, ⌊hi_frac·n⌋]` relative to a reference size `n`,
/// clipped to `len`.
pub fn window_from_fractions(fractions: [f64; 2], n: usize, len: usize) -> Result<(usize, usize)> {
    let [a, b] = fractions;
    if !(a > 0.0 && a < b && b <= 1.0) {
        return Err(ExperimentError::Config(format!("fit_window [{a}, {b}] must satisfy 0 < lo < hi <= 1")));
    }
    let lo = ((a * n as f64).ceil() as usize).max(1);
    let hi = ((b * n as f64).floor() as usize).min(len);
    if lo > hi {
        return Err(ExperimentError::Config(format!("fit window [{lo}, {hi}] is empty for spectrum length {len}")));
    }
    Ok((lo, hi))
}
