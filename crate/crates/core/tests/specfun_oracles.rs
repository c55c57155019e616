//! Special functions against independent oracles written here.

use std::f64::consts::PI;

use proptest::prelude::*;
use zaremba_core::specfun::{self, quad};

/// Direct power series `Σ (x/2)^{2k+m} / (k! (k+m)!)`, fine for moderate arguments.
fn i_series(m: u32, x: f64) -> f64 {
    let mut term = (0.5 * x).powi(m as i32) / (1..=m).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..400 {
        term *= (0.25 * x * x) / (k as f64 * (k + m) as f64);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    sum
}

/// `J_m(x) = (1/π) ∫₀^π cos(mτ - x sin τ) dτ` by the trapezoid rule
/// (spectrally accurate for this periodic integrand).
fn j_integral(m: u32, x: f64) -> f64 {
    let n = 2000;
    let h = PI / n as f64;
    let f = |t: f64| (m as f64 * t - x * t.sin()).cos();
    let mut s = 0.5 * (f(0.0) + f(PI));
    for k in 1..n {
        s += f(k as f64 * h);
    }
    s * h / PI
}

#[test]
fn bessel_i_matches_series() {
    for m in [0u32, 1, 2, 5, 10, 30] {
        for x in [0.1, 0.5, 1.0, 3.0, 10.0, 25.0] {
            let got = specfun::bessel_i(m, x).unwrap().value;
            let want = i_series(m, x);
            assert!((got - want).abs() <= 1e-13 * want, "I_{m}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn frozen_bessel_values() {
    // Values from the series oracle above.
    let cases =
        [(0u32, 1.0, 1.266_065_877_752_008_4), (1, 1.0, 0.565_159_103_992_485), (2, 5.0, 17.505_614_966_624_24)];
    for (m, x, want) in cases {
        assert!((i_series(m, x) - want).abs() < 1e-14 * want);
        assert!((specfun::bessel_i(m, x).unwrap().value - want).abs() < 1e-13 * want);
    }
}

#[test]
fn scaled_form_beyond_overflow() {
    // ln I_0(800) = 800 - ln(2π·800)/2 + ln(1 + 1/(8·800) + 9/(2·(8·800)²))
    let s = specfun::bessel_i_scaled(0, 800.0).unwrap();
    let z: f64 = 8.0 * 800.0;
    let want = 800.0 - 0.5 * (2.0 * PI * 800.0).ln() + (1.0 + 1.0 / z + 9.0 / (2.0 * z * z)).ln();
    assert!((s.ln_value - want).abs() < 1e-9);
    assert!(specfun::bessel_i(0, 800.0).is_err());
}

#[test]
fn bessel_j_matches_integral() {
    for m in [0u32, 1, 3, 7, 20] {
        for x in [0.3, 1.0, 4.5, 12.0, 30.0] {
            let got = specfun::bessel_j(m, x);
            let want = j_integral(m, x);
            assert!((got - want).abs() < 1e-13, "J_{m}({x}): {got} vs {want}");
        }
    }
}

#[test]
fn zeros_are_roots_and_spacing_tends_to_pi() {
    let zs = specfun::bessel_j_zeros(3, 60).unwrap();
    for z in &zs {
        assert!(j_integral(3, z.value).abs() < 1e-12);
    }
    let last = zs[59].value - zs[58].value;
    assert!((last - PI).abs() < 1e-3);
    assert!(zs.windows(2).all(|w| w[1].value - w[0].value > 2.9));
}

#[test]
fn interlacing_of_zeros() {
    // j_{m,k} < j_{m+1,k} < j_{m,k+1}
    for m in 0..10u32 {
        let a = specfun::bessel_j_zeros(m, 10).unwrap();
        let b = specfun::bessel_j_zeros(m + 1, 10).unwrap();
        for k in 0..9 {
            assert!(a[k].value < b[k].value && b[k].value < a[k + 1].value);
        }
    }
}

#[test]
fn gamma_half_integers() {
    assert!((specfun::gamma_fn(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    assert!((specfun::gamma_fn(1.5).unwrap() - 0.5 * PI.sqrt()).abs() < 1e-14);
    assert!((specfun::gamma_fn(6.0).unwrap() - 120.0).abs() < 1e-11);
    assert!(specfun::gamma_fn(0.0).is_err());
}

#[test]
fn quadrature_of_known_integrals() {
    let r = quad::integrate(|x| (-x * x).exp(), 0.0, 6.0, 1e-14, 1e-13).unwrap();
    assert!((r.value - 0.5 * PI.sqrt()).abs() < 1e-12);
    let r = quad::integrate(|x| x.ln(), 0.0, 1.0, 1e-12, 1e-12).unwrap();
    assert!((r.value + 1.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// `I_{m-1} - I_{m+1} = (2m/x) I_m`, in scaled form.
    #[test]
    fn modified_bessel_recurrence(m in 1u32..=100, x in 0.5f64..10.0) {
        let lm1 = specfun::bessel_i_scaled(m - 1, x).unwrap().ln_value;
        let l = specfun::bessel_i_scaled(m, x).unwrap().ln_value;
        let lp1 = specfun::bessel_i_scaled(m + 1, x).unwrap().ln_value;
        let lhs = (lm1 - l).exp() - (lp1 - l).exp();
        let rhs = 2.0 * m as f64 / x;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs, "m {} x {}: {} vs {}", m, x, lhs, rhs);
    }

    /// `I_m' = I_{m+1} + (m/x) I_m`.
    #[test]
    fn log_derivative_identity(m in 0u32..=200, x in 0.01f64..100.0) {
        let d = specfun::bessel_i_log_derivative(m, x).unwrap();
        let r = specfun::bessel_i_ratio_next(m, x).unwrap();
        prop_assert!((d - (r + m as f64 / x)).abs() <= 1e-13 * d.abs());
        prop_assert!(r > 0.0 && r < 1.0);
    }

    /// `J_{m-1} + J_{m+1} = (2m/x) J_m`.
    #[test]
    fn bessel_j_recurrence(m in 1u32..=40, x in 0.5f64..40.0) {
        let lhs = specfun::bessel_j(m - 1, x) + specfun::bessel_j(m + 1, x);
        let rhs = 2.0 * m as f64 / x * specfun::bessel_j(m, x);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    /// Profile is increasing in `r` and equals 1 at the rim.
    #[test]
    fn profile_monotone(m in 0u32..50, x in 0.1f64..50.0, r in 0.0f64..1.0) {
        let a = specfun::bessel_i_profile(m, x, r).unwrap();
        let b = specfun::bessel_i_profile(m, x, (r + 0.01).min(1.0)).unwrap();
        prop_assert!(a <= b + 1e-15);
        prop_assert!((specfun::bessel_i_profile(m, x, 1.0).unwrap() - 1.0).abs() < 1e-14);
    }
}
