//! Closed-form Weyl constants for `-Δ` with the mixed boundary condition.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{ExperimentError, Result};
use crate::specfun::gamma_fn;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub n: u32,
    /// `(2π)^{-(n-1)/2} 2^{1-n} / Γ(1 + (n-1)/2)`
    pub c_n: f64,
    /// `c_n |Σ₊|`
    #[serde(rename = "C0_plus")]
    pub c0_plus: f64,
    /// `c_n |∂Ω|`
    #[serde(rename = "C0")]
    pub c0: f64,
    /// `(2π)^{-n} |Ω| ω_n` for the symbol `|ξ|²`
    #[serde(rename = "C_A")]
    pub c_a: f64,
    pub arc_length: f64,
    pub boundary_length: f64,
    pub domain_measure: f64,
}

impl ConstantsReport {
    /// Limit of `s_j j^{2/(n-1)}` for the mixed Krein term.
    pub fn predicted_mixed(&self) -> f64 {
        self.c0_plus.powf(2.0 / (self.n - 1) as f64)
    }

    /// Same limit with the whole boundary carrying the Robin condition.
    pub fn predicted_full(&self) -> f64 {
        self.c0.powf(2.0 / (self.n - 1) as f64)
    }

    /// Weyl exponent `2/(n-1)`.
    pub fn exponent(&self) -> f64 {
        2.0 / (self.n - 1) as f64
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: u32) -> Result<f64> {
    let h = n as f64 / 2.0;
    Ok(PI.powf(h) / gamma_fn(1.0 + h).map_err(ExperimentError::compute)?)
}

pub fn constants(n: u32, arc_length: f64, boundary_length: f64, domain_measure: f64) -> Result<ConstantsReport> {
    if n < 2 {
        return Err(ExperimentError::Config(format!("dimension n = {n} must be at least 2")));
    }
    for (name, v) in
        [("arc_length", arc_length), ("boundary_length", boundary_length), ("domain_measure", domain_measure)]
    {
        if !(v > 0.0) || !v.is_finite() {
            return Err(ExperimentError::Config(format!("{name} = {v} must be positive")));
        }
    }
    let m = (n - 1) as f64;
    let c_n = (2.0 * PI).powf(-m / 2.0) * 2f64.powf(-m) / gamma_fn(1.0 + m / 2.0).map_err(ExperimentError::compute)?;
    let c_a = (2.0 * PI).powi(-(n as i32)) * domain_measure * unit_ball_volume(n)?;
    Ok(ConstantsReport {
        n,
        c_n,
        c0_plus: c_n * arc_length,
        c0: c_n * boundary_length,
        c_a,
        arc_length,
        boundary_length,
        domain_measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_values() {
        let r = constants(2, PI, 2.0 * PI, PI).unwrap();
        assert!((r.c_n - 1.0 / (2f64.sqrt() * PI)).abs() < 1e-14);
        assert!((r.c0_plus - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!((r.c0 - 2f64.sqrt()).abs() < 1e-14);
        assert!((r.c_a - 0.25).abs() < 1e-14);
        assert!((r.predicted_mixed() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(constants(1, 1.0, 1.0, 1.0).is_err());
        assert!(constants(2, 0.0, 1.0, 1.0).is_err());
    }
}
