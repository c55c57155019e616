//! Discrete Fourier multipliers as dense circulant matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;

use super::{LinalgError, Result};

/// Signed mode number of DFT index `k` for length `n`: `k` for `k < n/2`,
/// `k - n` otherwise (the Nyquist index maps to `-n/2`).
pub fn signed_mode(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// First column `c` of the circulant `F^{-1} diag(symbol) F`, so that the
/// matrix entry `(i, j)` is `c[(i - j) mod n]`.
///
/// The symbol must have a real kernel (Hermitian symmetric up to roundoff).
pub fn circulant_column(symbol: &[Complex64]) -> Result<Vec<f64>> {
    let n = symbol.len();
    if n == 0 {
        return Err(LinalgError::Empty);
    }
    if symbol.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    let mut buf = symbol.to_vec();
    FftPlanner::<f64>::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let peak = buf.iter().fold(0.0_f64, |m, z| m.max(z.norm())) * scale;
    let worst_imag = buf.iter().fold(0.0_f64, |m, z| m.max(z.im.abs())) * scale;
    if worst_imag > 1e-10 * peak.max(f64::MIN_POSITIVE) {
        return Err(LinalgError::NotSymmetric { asymmetry: worst_imag, scale: peak });
    }
    Ok(buf.iter().map(|z| z.re * scale).collect())
}

/// Dense circulant matrix from its first column.
pub fn circulant_matrix(column: &[f64]) -> DMatrix<f64> {
    let n = column.len();
    DMatrix::from_fn(n, n, |i, j| column[(i + n - j) % n])
}

/// Dense Fourier multiplier matrix for `symbol` (DFT ordering).
pub fn multiplier_matrix(symbol: &[Complex64]) -> Result<DMatrix<f64>> {
    Ok(circulant_matrix(&circulant_column(symbol)?))
}

/// Applies the multiplier to a real vector by FFT.
pub fn apply_multiplier(symbol: &[Complex64], v: &[f64]) -> Result<Vec<f64>> {
    let n = symbol.len();
    if v.len() != n {
        return Err(LinalgError::DimensionMismatch { left: n, right: v.len() });
    }
    let mut planner = FftPlanner::<f64>::new();
    let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (b, s) in buf.iter_mut().zip(symbol) {
        *b *= s;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf.iter().map(|z| z.re / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_symbol_is_scaled_identity() {
        let m = multiplier_matrix(&[Complex64::new(2.5, 0.0); 8]).unwrap();
        assert!((m - DMatrix::identity(8, 8) * 2.5).norm() < 1e-14);
    }

    #[test]
    fn dense_and_fft_application_agree() {
        let n = 16;
        let sym: Vec<Complex64> = (0..n)
            .map(|k| {
                let m = signed_mode(k, n) as f64;
                Complex64::new(1.0 / (1.0 + m * m), 0.0)
            })
            .collect();
        let v: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let dense = multiplier_matrix(&sym).unwrap() * nalgebra::DVector::from_vec(v.clone());
        let fft = apply_multiplier(&sym, &v).unwrap();
        for i in 0..n {
            assert!((dense[i] - fft[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn signed_modes() {
        assert_eq!(signed_mode(0, 8), 0);
        assert_eq!(signed_mode(3, 8), 3);
        assert_eq!(signed_mode(4, 8), -4);
        assert_eq!(signed_mode(7, 8), -1);
    }
}
