//! Singular-value asymptotics of `b₁ P₁ b₂ ⋯ b_l P_l b_{l+1}` on the circle.
//!
//! `P_i` has the symbol `κ_i |m|^{-t_i}` (value 1 at `m = 0`) and the `b`'s
//! are piecewise-constant multipliers. The predicted limit of `s_j j^t`,
//! `t = Σ t_i`, is `((1/2π) · 2 · ∫ |κ ∏ b|^{1/t} dθ)^t`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fit::{weyl_fit, FitOptions, WeylFitResult};
use super::{ExperimentError, Result};
use crate::linalg::{self, fourier, Basis, GridOperator};

const TAU: f64 = 2.0 * PI;

/// Piecewise-constant function on the circle: `values[i]` on
/// `[breaks[i], breaks[i+1])`, the last piece wrapping to `breaks[0] + 2π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpFunction {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl JumpFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breaks.is_empty() || breaks.len() != values.len() {
            return Err(ExperimentError::Config("jump function needs matching non-empty breaks and values".into()));
        }
        if breaks.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(ExperimentError::Config("jump function entries must be finite".into()));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks[0] < 0.0 || *breaks.last().unwrap() >= TAU {
            return Err(ExperimentError::Config("jump breaks must increase within [0, 2π)".into()));
        }
        Ok(Self { breaks, values })
    }

    pub fn constant(value: f64) -> Self {
        Self { breaks: vec![0.0], values: vec![value] }
    }

    /// `value` on the arc `[start, start + length)`, zero elsewhere.
    pub fn arc(start: f64, length: f64, value: f64) -> Result<Self> {
        if !(length > 0.0) || length > TAU {
            return Err(ExperimentError::Config(format!("arc length {length} outside (0, 2π]")));
        }
        if length >= TAU {
            return Ok(Self::constant(value));
        }
        let s = start.rem_euclid(TAU);
        let e = (s + length).rem_euclid(TAU);
        if s < e {
            let mut b = vec![s, e];
            let mut v = vec![value, 0.0];
            if s > 0.0 {
                b.insert(0, 0.0);
                v.insert(0, 0.0);
            }
            Self::new(b, v)
        } else if e == 0.0 {
            Self::new(vec![0.0, s], vec![0.0, value])
        } else {
            Self::new(vec![0.0, e, s], vec![value, 0.0, value])
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        match self.breaks.iter().rposition(|&b| b <= t) {
            Some(i) => self.values[i],
            None => *self.values.last().unwrap(),
        }
    }
}

/// `κ |m|^{-order}` factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolFactor {
    pub order: f64,
    #[serde(default = "one")]
    pub coeff: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComposedReport {
    pub total_order: f64,
    pub predicted: f64,
    pub fit: WeylFitResult,
    /// `|fit - predicted| / predicted`
    pub relative_gap: f64,
    pub singular_values: Vec<f64>,
}

/// `((1/2π)·2·∫ |κ ∏ b|^{1/t} dθ)^t`, integrated exactly over the common refinement.
pub fn composed_prediction(factors: &[SymbolFactor], multipliers: &[JumpFunction]) -> Result<f64> {
    let t: f64 = factors.iter().map(|f| f.order).sum();
    if !(t > 0.0) {
        return Err(ExperimentError::Config("total order must be positive".into()));
    }
    let kappa: f64 = factors.iter().map(|f| f.coeff).product();
    let mut cuts: Vec<f64> = multipliers.iter().flat_map(|m| m.breaks.iter().copied()).collect();
    cuts.push(0.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut integral = 0.0;
    for (i, &a) in cuts.iter().enumerate() {
        let b = cuts.get(i + 1).copied().unwrap_or(TAU);
        let mid = 0.5 * (a + b);
        let prod: f64 = kappa * multipliers.iter().map(|m| m.eval(mid)).product::<f64>();
        integral += prod.abs().powf(1.0 / t) * (b - a);
    }
    Ok((integral / PI).powf(t))
}

fn symbol_matrix(factor: &SymbolFactor, n: usize) -> Result<DMatrix<f64>> {
    let sym: Vec<Complex64> = (0..n)
        .map(|k| {
            let m = fourier::signed_mode(k, n);
            let v = if m == 0 { 1.0 } else { factor.coeff * (m.unsigned_abs() as f64).powf(-factor.order) };
            Complex64::new(v, 0.0)
        })
        .collect();
    Ok(fourier::multiplier_matrix(&sym)?)
}

/// Dense `b₁ P₁ ⋯ P_l b_{l+1}` on the `n`-point circle grid.
pub fn assemble_composed(factors: &[SymbolFactor], multipliers: &[JumpFunction], n: usize) -> Result<GridOperator> {
    let theta: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
    let scale_rows = |a: &mut DMatrix<f64>, b: &JumpFunction| {
        for (i, &t) in theta.iter().enumerate() {
            let v = b.eval(t);
            a.row_mut(i).scale_mut(v);
        }
    };
    let mut acc = DMatrix::identity(n, n);
    scale_rows(&mut acc, &multipliers[0]);
    for (f, b) in factors.iter().zip(&multipliers[1..]) {
        acc *= symbol_matrix(f, n)?;
        for (j, &t) in theta.iter().enumerate() {
            acc.column_mut(j).scale_mut(b.eval(t));
        }
    }
    Ok(GridOperator::new(acc, Basis::CircleGrid, TAU / n as f64)?)
}

/// Assembles, fits `s_j j^t` over `window` and compares with the prediction.
pub fn composed_operator_check(
    factors: &[SymbolFactor],
    multipliers: &[JumpFunction],
    n: usize,
    window: (usize, usize),
    options: FitOptions,
) -> Result<ComposedReport> {
    let l = factors.len();
    if l == 0 || l > 3 {
        return Err(ExperimentError::Config(format!("need 1..=3 symbol factors, got {l}")));
    }
    if multipliers.len() != l + 1 {
        return Err(ExperimentError::Config(format!(
            "need {} multipliers for {l} factors, got {}",
            l + 1,
            multipliers.len()
        )));
    }
    if factors.iter().any(|f| !(f.order > 0.0) || !f.coeff.is_finite()) {
        return Err(ExperimentError::Config("symbol orders must be positive".into()));
    }
    let t: f64 = factors.iter().map(|f| f.order).sum();
    if t > 3.0 {
        return Err(ExperimentError::Config(format!("total order {t} exceeds 3")));
    }
    if n < 512 || !n.is_power_of_two() {
        return Err(ExperimentError::Config(format!("grid_n = {n} must be a power of two >= 512")));
    }
    let predicted = composed_prediction(factors, multipliers)?;
    let op = assemble_composed(factors, multipliers, n)?;
    let spec = linalg::singular_values(&op, "composed")?;
    let fit = weyl_fit(&spec, t, window, options)?.with_prediction(predicted);
    let relative_gap = fit.relative_error.unwrap_or(f64::NAN);
    Ok(ComposedReport { total_order: t, predicted, fit, relative_gap, singular_values: spec.values().to_vec() })
}
