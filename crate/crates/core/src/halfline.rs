//! Constant-coefficient half-line model in two dimensions.
//!
//! The boundary line is periodized to `(-T, T]` and sampled on the
//! cell-centred grid `t_i = -T + (i + 1/2) h`, `h = 2T/N`, so that the cut
//! `t = 0` falls between two samples and the reflection `J t = -t` maps grid
//! points onto grid points. Fourier multipliers are dense circulants built
//! from sampled symbols. The Nyquist sample of the half-order factors
//! `λ±` and of `-(τ²+α²)^{-1/2}` is set to zero, which keeps
//! `λ₊ λ₋ = (τ²+α²)^{-1/2}` exact on every retained frequency.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, fourier, Basis, GridOperator, LinalgError, SingularSpectrum};
use crate::specfun::quad::gauss_legendre;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HalflineError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid symbol: {0}")]
    Symbol(String),
    #[error("truncation needs a circle or half-line grid operator, got {0:?}")]
    WrongBasis(Basis),
    #[error("empty plus mask")]
    EmptyMask,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, HalflineError>;

/// Periodized boundary line `(-T, T]` with `N` cell-centred samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalflineGrid {
    extent: f64,
    size: usize,
}

impl HalflineGrid {
    pub fn new(extent: f64, size: usize) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(HalflineError::Grid(format!("extent {extent} must be positive")));
        }
        if size < 64 || !size.is_power_of_two() {
            return Err(HalflineError::Grid(format!("size {size} must be a power of two >= 64")));
        }
        Ok(Self { extent, size })
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / self.size as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.extent + (i as f64 + 0.5) * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.size).map(|i| self.point(i)).collect()
    }

    /// Angular frequency `τ_k = π m_k / T` of DFT index `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI * fourier::signed_mode(k, self.size) as f64 / self.extent
    }

    pub fn nyquist_index(&self) -> usize {
        self.size / 2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    /// `(τ² + α²)^{1/2}`
    SqrtFull,
    /// `(α + iτ)^{-1/2}`
    LambdaPlus,
    /// `(α - iτ)^{-1/2}`
    LambdaMinus,
    /// `-(τ² + α²)^{-1/2}`
    P0NuGamma,
    /// `(τ² + α²)^{-1/4}`, the even square root of `|p0|`
    AbsP0Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymbolSpec {
    pub kind: SymbolKind,
    pub alpha: f64,
}

impl SymbolSpec {
    pub fn new(kind: SymbolKind, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(HalflineError::Symbol(format!("alpha {alpha} must be positive")));
        }
        Ok(Self { kind, alpha })
    }

    /// Symbol value at frequency `tau` (principal branch for `λ±`).
    pub fn eval(&self, tau: f64) -> Complex64 {
        let a = self.alpha;
        match self.kind {
            SymbolKind::SqrtFull => Complex64::new((tau * tau + a * a).sqrt(), 0.0),
            SymbolKind::LambdaPlus => Complex64::new(a, tau).powf(-0.5),
            SymbolKind::LambdaMinus => Complex64::new(a, -tau).powf(-0.5),
            SymbolKind::P0NuGamma => Complex64::new(-1.0 / (tau * tau + a * a).sqrt(), 0.0),
            SymbolKind::AbsP0Sqrt => Complex64::new((tau * tau + a * a).powf(-0.25), 0.0),
        }
    }

    fn zero_at_nyquist(&self) -> bool {
        !matches!(self.kind, SymbolKind::SqrtFull)
    }
}

/// Sampled symbol in DFT ordering.
pub fn symbol_samples(sym: &SymbolSpec, grid: &HalflineGrid) -> Vec<Complex64> {
    (0..grid.size())
        .map(|k| {
            if k == grid.nyquist_index() && sym.zero_at_nyquist() {
                Complex64::new(0.0, 0.0)
            } else {
                sym.eval(grid.frequency(k))
            }
        })
        .collect()
}

/// Indices of the grid points with `t_i > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlusMask {
    indices: Vec<usize>,
}

impl PlusMask {
    pub fn for_grid(grid: &HalflineGrid) -> Self {
        Self { indices: (0..grid.size()).filter(|&i| grid.point(i) > 0.0).collect() }
    }

    pub fn from_indices(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(HalflineError::EmptyMask);
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Complement within `0..n`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        let mut inside = vec![false; n];
        for &i in &self.indices {
            inside[i] = true;
        }
        (0..n).filter(|&i| !inside[i]).collect()
    }
}

/// Discrete Fourier multiplier `Op(sym)` on the full grid.
pub fn op_symbol(sym: &SymbolSpec, grid: &HalflineGrid) -> Result<GridOperator> {
    let m = fourier::multiplier_matrix(&symbol_samples(sym, grid))?;
    Ok(GridOperator::new(m, Basis::HalflineGrid, grid.spacing())?)
}

/// `r⁺ A e⁺`: principal submatrix on the mask.
pub fn truncate(a: &GridOperator, mask: &PlusMask) -> Result<GridOperator> {
    let basis = match a.basis() {
        Basis::HalflineGrid => Basis::HalflinePlus,
        Basis::CircleGrid => Basis::ArcGrid,
        other => return Err(HalflineError::WrongBasis(other)),
    };
    if mask.is_empty() {
        return Err(HalflineError::EmptyMask);
    }
    Ok(a.restrict(mask.indices(), basis)?)
}

fn spec(kind: SymbolKind, alpha: f64) -> Result<SymbolSpec> {
    SymbolSpec::new(kind, alpha)
}

/// `L₀ = r⁺ Op((τ²+α²)^{1/2}) e⁺`.
pub fn assemble_l0(alpha: f64, grid: &HalflineGrid, mask: &PlusMask) -> Result<GridOperator> {
    truncate(&op_symbol(&spec(SymbolKind::SqrtFull, alpha)?, grid)?, mask)
}

/// `L₀⁻¹ = Λ₊,₊ Λ₋,₊` (product of the truncated factors, in that order).
pub fn assemble_l0_inverse(alpha: f64, grid: &HalflineGrid, mask: &PlusMask) -> Result<GridOperator> {
    let lp = truncate(&op_symbol(&spec(SymbolKind::LambdaPlus, alpha)?, grid)?, mask)?;
    let lm = truncate(&op_symbol(&spec(SymbolKind::LambdaMinus, alpha)?, grid)?, mask)?;
    Ok(lp.compose(&lm)?)
}

/// Minus-side indices ordered so that position `q` is the reflection of
/// plus position `q` (`t = -t_plus[q]`).
fn reflected_minus(grid: &HalflineGrid, mask: &PlusMask) -> Result<Vec<usize>> {
    let n = grid.size();
    mask.indices()
        .iter()
        .map(|&i| {
            let j = n - 1 - i;
            if (grid.point(j) + grid.point(i)).abs() > 1e-9 * grid.spacing() || mask.indices().contains(&j) {
                Err(HalflineError::Grid("plus mask is not reflection symmetric".into()))
            } else {
                Ok(j)
            }
        })
        .collect()
}

/// `G⁺(Q) = r⁺ Q e⁻ J` for a full-grid operator `Q`.
pub fn g_plus(q: &GridOperator, grid: &HalflineGrid, mask: &PlusMask) -> Result<DMatrix<f64>> {
    let minus = reflected_minus(grid, mask)?;
    let plus = mask.indices();
    Ok(DMatrix::from_fn(plus.len(), minus.len(), |r, c| q.matrix()[(plus[r], minus[c])]))
}

/// `G⁻(Q) = J r⁻ Q e⁺` for a full-grid operator `Q`.
pub fn g_minus(q: &GridOperator, grid: &HalflineGrid, mask: &PlusMask) -> Result<DMatrix<f64>> {
    let minus = reflected_minus(grid, mask)?;
    let plus = mask.indices();
    Ok(DMatrix::from_fn(minus.len(), plus.len(), |r, c| q.matrix()[(minus[r], plus[c])]))
}

/// Kernel of `Λ₊`: `k(t) = t^{-1/2} e^{-α t} / √π` for `t > 0`, zero otherwise.
pub fn lambda_plus_kernel(alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-alpha * t).exp() / (std::f64::consts::PI * t).sqrt()
    }
}

/// Product-integration weights `c_n = ∫₀^∞ k(x) D_N(x/h - n) dx`, `n = 0..N`,
/// where `D_N(y) = N⁻¹ Σ_{|k|<N/2} e^{2πiky/N}` is the periodic cardinal
/// function of the grid. The first cell uses `x = u²` to remove the
/// `x^{-1/2}` singularity; every other cell uses a 16-point Gauss rule.
pub fn hankel_kernel_weights(alpha: f64, grid: &HalflineGrid) -> Vec<f64> {
    let n = grid.size();
    let h = grid.spacing();
    let (gx, gw) = gauss_legendre(16);
    let sqrt_pi = std::f64::consts::PI.sqrt();
    // e^{-αx}/√(πx) < 1e-19 beyond this point
    let x_max = 42.0 / alpha;
    let cells = (x_max / h).ceil() as usize + 1;
    let mut nodes = Vec::with_capacity(cells * gx.len());
    let su = h.sqrt();
    for (x, w) in gx.iter().zip(&gw) {
        let u = 0.5 * su * (x + 1.0);
        let xx = u * u;
        nodes.push((xx / h, 0.5 * su * w * 2.0 * (-alpha * xx).exp() / sqrt_pi));
    }
    for cell in 1..cells {
        let a = cell as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            let xx = a + 0.5 * h * (x + 1.0);
            nodes.push((xx / h, 0.5 * h * w * lambda_plus_kernel(alpha, xx)));
        }
    }
    let nf = n as f64;
    let phi = std::f64::consts::PI / nf;
    let step = Complex64::from_polar(1.0, phi);
    let mut c = vec![0.0; n];
    for &(y, w) in &nodes {
        // D_N(y - k) = (-1)^k sin(a + kφ) / (N sin(b - kφ)), a = π y (N-1)/N, b = π y / N
        let a = std::f64::consts::PI * y * (nf - 1.0) / nf;
        let b = std::f64::consts::PI * y / nf;
        let mut num = Complex64::from_polar(1.0, a);
        let mut den = Complex64::from_polar(1.0, b);
        for (k, ck) in c.iter_mut().enumerate() {
            if k % 64 == 0 {
                num = Complex64::from_polar(1.0, a + k as f64 * phi);
                den = Complex64::from_polar(1.0, b - k as f64 * phi);
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            // D_N(jN) = (N-1)/N; Gauss nodes never land there exactly
            let d = if den.im.abs() < 1e-300 { (nf - 1.0) / nf } else { sign * num.im / (nf * den.im) };
            *ck += w * d;
            num *= step;
            den *= step.conj();
        }
    }
    c
}

/// Hankel form of `G⁺(Λ₊)` assembled from the closed-form kernel:
/// `H[p, q] = c_{p+q+1}` with the weights of [`hankel_kernel_weights`].
pub fn hankel_operator(alpha: f64, grid: &HalflineGrid, mask: &PlusMask) -> Result<GridOperator> {
    let c = hankel_kernel_weights(alpha, grid);
    let plus = mask.indices();
    let n = grid.size();
    let half = n / 2;
    // position of each plus index measured in cells from the cut
    let offs: Vec<usize> = plus
        .iter()
        .map(|&i| if i >= half { Ok(i - half) } else { Err(HalflineError::Grid("plus index left of the cut".into())) })
        .collect::<Result<_>>()?;
    let m = plus.len();
    let h = DMatrix::from_fn(m, m, |r, s| c[(offs[r] + offs[s] + 1) % n]);
    Ok(GridOperator::new(h, Basis::HalflinePlus, grid.spacing())?)
}

/// `G⁺(Λ₊)` from the FFT multiplier.
pub fn hankel_fft(alpha: f64, grid: &HalflineGrid, mask: &PlusMask) -> Result<DMatrix<f64>> {
    g_plus(&op_symbol(&spec(SymbolKind::LambdaPlus, alpha)?, grid)?, grid, mask)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecompositionReport {
    /// `‖L₀⁻¹ + P₀,₊ + G⁺G⁻‖₂ / ‖L₀⁻¹‖₂` with FFT-assembled singular Green factors.
    pub r1: f64,
    /// Same with the Hankel-kernel assembly `H Hᵀ`.
    pub r2: f64,
    /// `‖H_kernel - H_fft‖₂ / ‖H_fft‖₂`.
    pub hankel_gap: f64,
    pub l0_inverse_norm: f64,
}

/// Checks `L₀⁻¹ = -P₀,₊ - G⁺(Λ₊) G⁻(Λ₋)` with both assemblies of the
/// singular Green term.
pub fn theorem57_check(alpha: f64, grid: &HalflineGrid, mask: &PlusMask) -> Result<DecompositionReport> {
    let lp = op_symbol(&spec(SymbolKind::LambdaPlus, alpha)?, grid)?;
    let lm = op_symbol(&spec(SymbolKind::LambdaMinus, alpha)?, grid)?;
    let p0 = op_symbol(&spec(SymbolKind::P0NuGamma, alpha)?, grid)?;
    let l0inv = truncate(&lp, mask)?.compose(&truncate(&lm, mask)?)?;
    let base = l0inv.matrix() + truncate(&p0, mask)?.matrix();
    let gp = g_plus(&lp, grid, mask)?;
    let gm = g_minus(&lm, grid, mask)?;
    let hk = hankel_operator(alpha, grid, mask)?;
    let norm_inv = linalg::norm2(l0inv.matrix())?;
    let res1 = &base + &gp * &gm;
    let res2 = &base + hk.matrix() * hk.matrix().transpose();
    let gap = linalg::norm2(&(hk.matrix() - &gp))? / linalg::norm2(&gp)?;
    Ok(DecompositionReport {
        r1: linalg::norm2(&res1)? / norm_inv,
        r2: linalg::norm2(&res2)? / norm_inv,
        hankel_gap: gap,
        l0_inverse_norm: norm_inv,
    })
}

/// Default smooth window: raised cosine supported on `(0, T/2)`.
pub fn raised_cosine_window(grid: &HalflineGrid) -> impl Fn(f64) -> f64 {
    let len = 0.5 * grid.extent();
    move |t: f64| {
        if t <= 0.0 || t >= len {
            0.0
        } else {
            0.5 * (1.0 - (2.0 * std::f64::consts::PI * t / len).cos())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GplusDecay {
    pub spectrum: SingularSpectrum,
    /// `median(s_j j^{1/2}, j ∈ [N/8, N/4]) / median(s_j j^{1/2}, j ∈ [N/32, N/16])`
    pub trend: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median of `values[j-1] * j^p` over the 1-based window `[lo, hi]`.
pub fn windowed_median(values: &[f64], p: f64, lo: usize, hi: usize) -> f64 {
    median((lo..=hi.min(values.len())).map(|j| values[j - 1] * (j as f64).powf(p)).collect())
}

/// Singular values of `ψ H` and their `j^{1/2}`-weighted decay trend.
pub fn gplus_decay<W: Fn(f64) -> f64>(
    alpha: f64,
    grid: &HalflineGrid,
    mask: &PlusMask,
    window: W,
) -> Result<GplusDecay> {
    let h = hankel_operator(alpha, grid, mask)?;
    let psi: Vec<f64> = mask.indices().iter().map(|&i| window(grid.point(i))).collect();
    let mut a = h.into_matrix();
    for (r, &p) in psi.iter().enumerate() {
        a.row_mut(r).scale_mut(p);
    }
    let values = linalg::singular_values_matrix(&a, false)?;
    let n = grid.size();
    let trend = windowed_median(&values, 0.5, n / 8, n / 4) / windowed_median(&values, 0.5, n / 32, n / 16);
    Ok(GplusDecay { spectrum: SingularSpectrum::new(values, "gplus", "")?, trend })
}

/// Gaussian bump centred at `center` with width `width`, cut to zero
/// outside `(lo, hi)`, sampled at the masked plus points.
pub fn bump(grid: &HalflineGrid, mask: &PlusMask, center: f64, width: f64, lo: f64, hi: f64) -> DVector<f64> {
    DVector::from_iterator(
        mask.len(),
        mask.indices().iter().map(|&i| {
            let t = grid.point(i);
            if t <= lo || t >= hi {
                0.0
            } else {
                (-((t - center) / width).powi(2)).exp()
            }
        }),
    )
}

/// Standard test vector: centre `T/4`, width `T/64`, support `(T/8, 7T/8)`.
pub fn standard_bump(grid: &HalflineGrid, mask: &PlusMask) -> DVector<f64> {
    let t = grid.extent();
    bump(grid, mask, 0.25 * t, t / 64.0, t / 8.0, 7.0 * t / 8.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationReport {
    /// `‖L₀⁻¹ L₀ u - u‖ / ‖u‖`
    pub left: f64,
    /// `‖L₀ L₀⁻¹ u - u‖ / ‖u‖`
    pub right: f64,
    /// Mass of `Λ₊ e⁺ u` within `T/8` of the periodic seam, relative to `‖u‖`.
    pub seam_leakage: f64,
}

/// Residuals of `L₀⁻¹ = Λ₊,₊Λ₋,₊` as a left and right inverse of `L₀` on `u`.
pub fn factorization_residuals(
    alpha: f64,
    grid: &HalflineGrid,
    mask: &PlusMask,
    u: &DVector<f64>,
) -> Result<FactorizationReport> {
    let l0 = assemble_l0(alpha, grid, mask)?;
    let inv = assemble_l0_inverse(alpha, grid, mask)?;
    let nu = u.norm();
    let left = (inv.apply(&l0.apply(u)?)? - u).norm() / nu;
    let right = (l0.apply(&inv.apply(u)?)? - u).norm() / nu;
    let lp = op_symbol(&spec(SymbolKind::LambdaPlus, alpha)?, grid)?;
    let full = extend_by_zero(grid, mask, u);
    let out = lp.apply(&full)?;
    let edge = grid.extent() * 7.0 / 8.0;
    let seam: f64 = (0..grid.size()).filter(|&i| grid.point(i).abs() > edge).map(|i| out[i] * out[i]).sum();
    Ok(FactorizationReport { left, right, seam_leakage: seam.sqrt() / nu })
}

/// `e⁺ u` on the full grid.
pub fn extend_by_zero(grid: &HalflineGrid, mask: &PlusMask, u: &DVector<f64>) -> DVector<f64> {
    let mut full = DVector::zeros(grid.size());
    for (k, &i) in mask.indices().iter().enumerate() {
        full[i] = u[k];
    }
    full
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportLeakage {
    /// `‖(Λ₊ u)|_{t<0}‖ / ‖u‖` for `u` supported in `t > δ`
    pub plus: f64,
    /// `‖(Λ₋ u)|_{t>0}‖ / ‖u‖` for `u` supported in `t < -δ`
    pub minus: f64,
}

/// Support preservation of the plus and minus factors for the standard bump
/// (and its reflection), with `δ = T/8`.
pub fn support_leakage(alpha: f64, grid: &HalflineGrid) -> Result<SupportLeakage> {
    let mask = PlusMask::for_grid(grid);
    let u = standard_bump(grid, &mask);
    let up = extend_by_zero(grid, &mask, &u);
    let n = grid.size();
    let um = DVector::from_fn(n, |i, _| up[n - 1 - i]);
    let lp = op_symbol(&spec(SymbolKind::LambdaPlus, alpha)?, grid)?;
    let lm = op_symbol(&spec(SymbolKind::LambdaMinus, alpha)?, grid)?;
    let a = lp.apply(&up)?;
    let b = lm.apply(&um)?;
    let plus: f64 = (0..n).filter(|&i| grid.point(i) < 0.0).map(|i| a[i] * a[i]).sum();
    let minus: f64 = (0..n).filter(|&i| grid.point(i) > 0.0).map(|i| b[i] * b[i]).sum();
    Ok(SupportLeakage { plus: plus.sqrt() / up.norm(), minus: minus.sqrt() / um.norm() })
}

/// `L(Q₁,Q₂) = (Q₁Q₂)₊ - Q₁,₊Q₂,₊` from the product symbol versus
/// `G⁺(Q₁)G⁻(Q₂)`, for `Q₁ = Q₂ = Op((τ²+α²)^{-1/4})`. Returns
/// `‖difference‖_F / ‖G⁺G⁻‖_F`.
pub fn l_q1q2_check(alpha: f64, grid: &HalflineGrid, mask: &PlusMask) -> Result<f64> {
    let q = op_symbol(&spec(SymbolKind::AbsP0Sqrt, alpha)?, grid)?;
    let qq = op_symbol(&spec(SymbolKind::P0NuGamma, alpha)?, grid)?.scaled(-1.0);
    let qp = truncate(&q, mask)?;
    let lhs = truncate(&qq, mask)?.matrix() - qp.matrix() * qp.matrix();
    let rhs = g_plus(&q, grid, mask)? * g_minus(&q, grid, mask)?;
    Ok((&lhs - &rhs).norm() / rhs.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (HalflineGrid, PlusMask) {
        let g = HalflineGrid::new(20.0, 256).unwrap();
        let m = PlusMask::for_grid(&g);
        (g, m)
    }

    #[test]
    fn grid_validation() {
        assert!(HalflineGrid::new(20.0, 100).is_err());
        assert!(HalflineGrid::new(20.0, 32).is_err());
        assert!(HalflineGrid::new(-1.0, 64).is_err());
        let g = HalflineGrid::new(20.0, 64).unwrap();
        assert!((g.spacing() * 64.0 - 40.0).abs() < 1e-12);
        assert!((g.point(0) + g.point(63)).abs() < 1e-12);
    }

    #[test]
    fn mask_splits_the_grid() {
        let (g, m) = small();
        assert_eq!(m.len(), 128);
        assert!(m.indices().iter().all(|&i| g.point(i) > 0.0));
        assert!(m.complement(256).iter().all(|&i| g.point(i) <= 0.0));
    }

    #[test]
    fn constant_mode_symbol_values() {
        let (g, _) = small();
        let ones = DVector::from_element(g.size(), 1.0);
        let s = op_symbol(&SymbolSpec::new(SymbolKind::SqrtFull, 1.5).unwrap(), &g).unwrap();
        assert!((s.apply(&ones).unwrap() - &ones * 1.5).norm() < 1e-12);
        let lp = op_symbol(&SymbolSpec::new(SymbolKind::LambdaPlus, 4.0).unwrap(), &g).unwrap();
        assert!((lp.apply(&ones).unwrap() - &ones * 0.5).norm() < 1e-12);
    }

    #[test]
    fn lambda_minus_is_transpose_of_lambda_plus() {
        let (g, _) = small();
        let lp = op_symbol(&SymbolSpec::new(SymbolKind::LambdaPlus, 1.0).unwrap(), &g).unwrap();
        let lm = op_symbol(&SymbolSpec::new(SymbolKind::LambdaMinus, 1.0).unwrap(), &g).unwrap();
        assert!((lp.matrix().transpose() - lm.matrix()).amax() < 1e-14);
    }

    #[test]
    fn truncate_identity_and_diagonal() {
        let (g, m) = small();
        let id = GridOperator::identity(g.size(), Basis::HalflineGrid, g.spacing());
        let t = truncate(&id, &m).unwrap();
        assert_eq!(t.basis(), Basis::HalflinePlus);
        assert_eq!(t.matrix(), &DMatrix::identity(m.len(), m.len()));
        let d = DMatrix::from_diagonal(&DVector::from_fn(g.size(), |i, _| i as f64));
        let t = truncate(&GridOperator::new(d, Basis::HalflineGrid, 1.0).unwrap(), &m).unwrap();
        for (k, &i) in m.indices().iter().enumerate() {
            assert_eq!(t.matrix()[(k, k)], i as f64);
        }
        let modal = GridOperator::identity(4, Basis::Modal, 1.0);
        assert!(matches!(truncate(&modal, &m), Err(HalflineError::WrongBasis(_))));
    }

    #[test]
    fn kernel_value() {
        assert!((lambda_plus_kernel(1.0, 1.0) - 0.207_553_748_710_297_8).abs() < 1e-12);
        assert_eq!(lambda_plus_kernel(1.0, -0.5), 0.0);
    }

    #[test]
    fn l0_is_spd_and_matches_truncated_symbol() {
        let (g, m) = small();
        let l0 = assemble_l0(1.0, &g, &m).unwrap();
        assert!(l0.is_symmetric());
        let ev = linalg::eigvalsh(l0.matrix()).unwrap();
        assert!(*ev.last().unwrap() >= 1.0 - 1e-10);
        let t = truncate(&op_symbol(&SymbolSpec::new(SymbolKind::SqrtFull, 1.0).unwrap(), &g).unwrap(), &m).unwrap();
        assert_eq!(l0.matrix(), t.matrix());
    }
}
