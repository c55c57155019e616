//! Helpers shared by integration targets.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use zaremba_core::linalg;

fn svals(a: &DMatrix<f64>) -> Vec<f64> {
    linalg::singular_values_matrix(a, false).unwrap()
}

/// Worst violation of `s_{j+k-1}(A+B) <= s_j(A) + s_k(B)` and
/// `s_{j+k-1}(AB) <= s_j(A) s_k(B)`, relative to `‖A‖‖B‖ + ‖A‖ + ‖B‖`.
pub fn ky_fan_violation(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let (sa, sb) = (svals(a), svals(b));
    let ssum = svals(&(a + b));
    let sprod = svals(&(a * b));
    let n = sa.len();
    let scale = sa[0] * sb[0] + sa[0] + sb[0];
    let mut worst = f64::NEG_INFINITY;
    for j in 0..n {
        for k in 0..(n - j) {
            worst = worst.max((ssum[j + k] - sa[j] - sb[k]) / scale);
            worst = worst.max((sprod[j + k] - sa[j] * sb[k]) / scale);
        }
    }
    worst
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
}

/// Seed of the fixed 50-pair Ky Fan sample.
pub const KY_FAN_SEED: u64 = 20_240_531;
