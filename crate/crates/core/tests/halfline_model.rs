//! Half-line Wiener-Hopf calculus at small grid sizes.

use proptest::prelude::*;
use zaremba_core::halfline::{self, HalflineGrid, PlusMask, SymbolKind, SymbolSpec};
use zaremba_core::linalg;

fn setup(n: usize) -> (HalflineGrid, PlusMask) {
    let g = HalflineGrid::new(20.0, n).unwrap();
    let m = PlusMask::for_grid(&g);
    (g, m)
}

#[test]
fn green_term_identity_both_assemblies() {
    for n in [256, 512] {
        let (g, m) = setup(n);
        let r = halfline::theorem57_check(1.0, &g, &m).unwrap();
        assert!(r.r1 < 1e-12, "r1 {}", r.r1);
        assert!(r.r2 < 1e-10, "r2 {}", r.r2);
        assert!(r.hankel_gap < 1e-10, "gap {}", r.hankel_gap);
        // ‖L₀⁻¹‖ approaches sup |τ²+1|^{-1/2} = 1
        assert!(r.l0_inverse_norm > 0.95 && r.l0_inverse_norm <= 1.0 + 1e-12);
    }
}

#[test]
fn left_factorization_converges() {
    let mut prev = f64::INFINITY;
    for n in [256, 512, 1024] {
        let (g, m) = setup(n);
        let u = halfline::standard_bump(&g, &m);
        let r = halfline::factorization_residuals(1.0, &g, &m, &u).unwrap();
        assert!(r.left <= prev / 2.0, "n {n}: {} after {prev}", r.left);
        prev = r.left;
    }
    assert!(prev < 1e-6);
}

#[test]
fn plus_minus_support_preservation() {
    let (g, _) = setup(512);
    let l = halfline::support_leakage(1.0, &g).unwrap();
    assert!(l.plus < 1e-6 && l.minus < 1e-6, "{l:?}");
    assert!((l.plus - l.minus).abs() < 1e-12);
}

#[test]
fn product_formula_for_truncations() {
    let (g, m) = setup(256);
    let r = halfline::l_q1q2_check(1.0, &g, &m).unwrap();
    assert!(r < 1e-10, "{r}");
}

#[test]
fn kernel_weights_reproduce_fft_hankel() {
    let (g, m) = setup(256);
    let h = halfline::hankel_operator(1.0, &g, &m).unwrap();
    let f = halfline::hankel_fft(1.0, &g, &m).unwrap();
    let gap = linalg::norm2(&(h.matrix() - &f)).unwrap() / linalg::norm2(&f).unwrap();
    assert!(gap < 1e-10, "{gap}");
}

#[test]
fn hankel_decay_is_faster_than_half() {
    let (g, m) = setup(512);
    let d = halfline::gplus_decay(1.0, &g, &m, halfline::raised_cosine_window(&g)).unwrap();
    assert!(d.trend < 1.0, "trend {}", d.trend);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// `λ₊(τ) λ₋(τ) = (τ² + α²)^{-1/2}` pointwise.
    #[test]
    fn symbol_factorization(alpha in 0.1f64..5.0, tau in -100.0f64..100.0) {
        let p = SymbolSpec::new(SymbolKind::LambdaPlus, alpha).unwrap().eval(tau);
        let q = SymbolSpec::new(SymbolKind::LambdaMinus, alpha).unwrap().eval(tau);
        let want = -SymbolSpec::new(SymbolKind::P0NuGamma, alpha).unwrap().eval(tau).re;
        prop_assert!(((p * q).re - want).abs() < 1e-14 * want.max(1.0));
        prop_assert!((p * q).im.abs() < 1e-14);
    }

    /// Compressions keep eigenvalues inside the symbol range.
    #[test]
    fn l0_spectrum_within_symbol_range(alpha in 0.3f64..3.0) {
        let (g, m) = setup(128);
        let l0 = halfline::assemble_l0(alpha, &g, &m).unwrap();
        let inv = halfline::assemble_l0_inverse(alpha, &g, &m).unwrap();
        let tau_max = g.frequency(g.nyquist_index()).abs();
        let ev = linalg::eigvalsh(l0.matrix()).unwrap();
        prop_assert!(*ev.last().unwrap() >= alpha * (1.0 - 1e-10));
        prop_assert!(ev[0] <= (tau_max * tau_max + alpha * alpha).sqrt() * (1.0 + 1e-10));
        let evi = linalg::eigvalsh(inv.matrix()).unwrap();
        prop_assert!(*evi.last().unwrap() >= -1e-12);
        prop_assert!(evi[0] <= 1.0 / alpha * (1.0 + 1e-10));
    }
}
