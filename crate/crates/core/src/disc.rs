//! Fourier-modal model of `-Δ + α²` on the unit disc.
//!
//! Every circle operator here is diagonal in `e^{imθ}`: the Dirichlet-to-
//! Neumann map (interior normal) has eigenvalues `p_m = -α I_m'(α)/I_m(α)`
//! and the Poisson Gram operator `K*K` has `q_m = ∫₀¹ (I_m(αr)/I_m(α))² r dr`.
//! Arc truncation is index restriction on the uniform grid `θ_i = 2πi/N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, fourier, Basis, GridOperator, LinalgError, SingularSpectrum};
use crate::specfun::{self, quad, SpecfunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiscError {
    #[error("invalid disc configuration: {0}")]
    Config(String),
    #[error("modal operator has {got} modes, grid of size {n} needs {need}")]
    SizeMismatch { got: usize, n: usize, need: usize },
    #[error("P' - f 1_arc is singular: eigenvalues in [{smallest:e}, {largest:e}], condition {condition:e}")]
    SingularNeumannSystem { smallest: f64, largest: f64, condition: f64 },
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, DiscError>;

/// Parameters of the disc model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscConfig {
    pub alpha: f64,
    pub b: f64,
    /// Arc length of `Σ₊`, starting at `θ = 0`.
    pub theta_plus: f64,
    /// Circle grid size `N`; the modal cut is `M = N/2`.
    pub grid_n: usize,
    /// Shift `K` of the Neumann-reference route.
    pub shift_k: f64,
}

impl Default for DiscConfig {
    fn default() -> Self {
        Self { alpha: 1.0, b: 0.0, theta_plus: std::f64::consts::PI, grid_n: 1024, shift_k: 0.2 }
    }
}

impl DiscConfig {
    pub fn mode_cut(&self) -> usize {
        self.grid_n / 2
    }

    /// Range checks that do not need the DtN eigenvalues.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= specfun::MAX_I_ARG) {
            return Err(DiscError::Config(format!("alpha {} outside (0, 1000]", self.alpha)));
        }
        if !self.b.is_finite() {
            return Err(DiscError::Config("b must be finite".into()));
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        if !(self.theta_plus > 0.0 && self.theta_plus <= two_pi + 1e-12) {
            return Err(DiscError::Config(format!("theta_plus {} outside (0, 2π]", self.theta_plus)));
        }
        if self.grid_n < 8 || !self.grid_n.is_power_of_two() {
            return Err(DiscError::Config(format!("grid_n {} must be a power of two >= 8", self.grid_n)));
        }
        if self.mode_cut() > specfun::MAX_I_ORDER as usize {
            return Err(DiscError::Config(format!("mode cut {} too large", self.mode_cut())));
        }
        if !(self.shift_k >= 0.0 && self.shift_k.is_finite()) {
            return Err(DiscError::Config(format!("shift_k {} must be >= 0", self.shift_k)));
        }
        Ok(())
    }

    /// 64-bit FNV-1a digest of the JSON form, used to label spectra.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).unwrap_or_default();
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in text.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        format!("{h:016x}")
    }
}

/// Circle operator diagonal in Fourier modes, stored for `|m| = 0..=M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalOperator {
    values: Vec<f64>,
}

impl ModalOperator {
    pub fn from_abs_modes(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(DiscError::Config("modal values must be finite and nonempty".into()));
        }
        Ok(Self { values })
    }

    /// Value at signed mode `m`.
    pub fn value(&self, m: i64) -> f64 {
        self.values[m.unsigned_abs() as usize]
    }

    /// Values for `|m| = 0..=M`.
    pub fn abs_values(&self) -> &[f64] {
        &self.values
    }

    pub fn mode_cut(&self) -> usize {
        self.values.len() - 1
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_abs_modes(self.values.iter().map(|&v| f(v)).collect())
    }

    /// Values over the full mode set `m = -M..M-1`.
    pub fn full_values(&self) -> Vec<f64> {
        let m = self.mode_cut() as i64;
        (-m..m).map(|k| self.value(k)).collect()
    }
}

/// Grid indices of `Σ₊ = {θ_i ∈ [0, theta_plus)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcMask {
    indices: Vec<usize>,
}

impl ArcMask {
    pub fn new(theta_plus: f64, n: usize) -> Result<Self> {
        let bound = theta_plus * n as f64 / (2.0 * std::f64::consts::PI);
        let indices: Vec<usize> = (0..n).filter(|&i| (i as f64) < bound - 1e-9).collect();
        if indices.is_empty() {
            return Err(DiscError::Config(format!("arc {theta_plus} contains no grid point for N = {n}")));
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
}

/// DtN eigenvalues `p_m = -α I_m'(α)/I_m(α)`, `|m| = 0..=M`.
pub fn dtn_modal(alpha: f64, m_cut: usize) -> Result<ModalOperator> {
    let values = (0..=m_cut)
        .map(|m| Ok(-alpha * specfun::bessel_i_log_derivative(m as u32, alpha)?))
        .collect::<Result<Vec<f64>>>()?;
    ModalOperator::from_abs_modes(values)
}

/// `q_m` by adaptive Gauss-Kronrod quadrature at the given relative tolerance.
///
/// With `s = r^{2m+2}`, `q_m = (2m+2)⁻¹ ∫₀¹ g(s^{1/(2m+2)})² ds` where
/// `g(r) = I_m(αr)/(r^m I_m(α))` is bounded and smooth.
pub fn poisson_gram_value(alpha: f64, m: u32, rel_tol: f64) -> Result<f64> {
    let ln_top = specfun::ln_series_sum(m, alpha);
    let e = 2.0 * f64::from(m) + 2.0;
    let g2 = |s: f64| {
        if s <= 0.0 {
            return (-2.0 * ln_top).exp();
        }
        let r = s.powf(1.0 / e);
        (2.0 * (specfun::ln_series_sum(m, alpha * r) - ln_top)).exp()
    };
    let r = quad::integrate(g2, 0.0, 1.0, 0.0, rel_tol).map_err(DiscError::from)?;
    Ok(r.value / e)
}

/// Poisson Gram eigenvalues `q_m`, `|m| = 0..=M`, to relative accuracy 1e-12.
pub fn poisson_gram_modal(alpha: f64, m_cut: usize) -> Result<ModalOperator> {
    let values = (0..=m_cut).map(|m| poisson_gram_value(alpha, m as u32, 1e-12)).collect::<Result<Vec<f64>>>()?;
    ModalOperator::from_abs_modes(values)
}

/// Symmetric circulant representing `op` on the grid `θ_i = 2πi/N`, `N = 2M`.
pub fn modal_to_grid(op: &ModalOperator, n: usize) -> Result<GridOperator> {
    let need = n / 2;
    if op.mode_cut() != need || n % 2 != 0 {
        return Err(DiscError::SizeMismatch { got: op.mode_cut(), n, need });
    }
    let symbol: Vec<Complex64> = (0..n).map(|k| Complex64::new(op.value(fourier::signed_mode(k, n)), 0.0)).collect();
    let m = fourier::multiplier_matrix(&symbol)?;
    Ok(GridOperator::symmetric(m, Basis::CircleGrid, 2.0 * std::f64::consts::PI / n as f64)?)
}

/// Modal data and arc for one configuration, shared by all routes.
#[derive(Debug, Clone)]
pub struct DiscModel {
    pub config: DiscConfig,
    pub p: ModalOperator,
    pub q: ModalOperator,
    pub arc: ArcMask,
}

impl DiscModel {
    pub fn new(config: DiscConfig) -> Result<Self> {
        config.validate()?;
        let m = config.mode_cut();
        let p = dtn_modal(config.alpha, m)?;
        if let Some((k, v)) = p.abs_values().iter().enumerate().find(|(_, &v)| config.b - v <= 0.0) {
            return Err(DiscError::Config(format!("b - p_m = {} <= 0 at |m| = {k}", config.b - v)));
        }
        let q = poisson_gram_modal(config.alpha, m)?;
        let arc = ArcMask::new(config.theta_plus, config.grid_n)?;
        Ok(Self { config, p, q, arc })
    }

    fn grid(&self, op: &ModalOperator) -> Result<GridOperator> {
        modal_to_grid(op, self.config.grid_n)
    }

    fn truncated(&self, op: &ModalOperator) -> Result<GridOperator> {
        Ok(self.grid(op)?.restrict(self.arc.indices(), Basis::ArcGrid)?)
    }

    /// `L = r⁺(b - P_{γ,ν})e⁺` on the arc.
    pub fn assemble_l(&self) -> Result<GridOperator> {
        let b = self.config.b;
        self.truncated(&self.p.map(|v| b - v)?)
    }

    /// `P₁,₊ = r⁺ grid(q) e⁺`.
    pub fn p1_plus(&self) -> Result<GridOperator> {
        self.truncated(&self.q)
    }

    /// `P₂,₊ = r⁺ grid(√q) e⁺`.
    pub fn p2_plus(&self) -> Result<GridOperator> {
        self.truncated(&self.q.map(f64::sqrt)?)
    }

    /// Sorted `{q_m/(b - p_m) : m = -M..M-1}`, the untruncated spectrum.
    pub fn full_boundary_spectrum(&self) -> Result<SingularSpectrum> {
        let b = self.config.b;
        let m = self.config.mode_cut() as i64;
        let v = (-m..m).map(|k| self.q.value(k) / (b - self.p.value(k))).collect();
        Ok(SingularSpectrum::new(v, "closed-form", self.config.digest())?)
    }

    /// `eig(Bᵀ L⁻¹ B)` for symmetric `B`, via `L = C Cᵀ` and `Z = C⁻¹ B`.
    fn pencil_spectrum(&self, l: &GridOperator, b: &DMatrix<f64>, route: &str) -> Result<SingularSpectrum> {
        let c = linalg::cholesky_lower(l.matrix())?;
        let z = c
            .solve_lower_triangular(b)
            .ok_or(DiscError::Linalg(LinalgError::NotPositiveDefinite { smallest: 0.0, largest: 0.0 }))?;
        let mut g = z.transpose() * &z;
        symmetrize(&mut g);
        let v = linalg::eigvalsh(&g)?;
        Ok(SingularSpectrum::new(v, route, self.config.digest())?)
    }

    /// Route A: `eig(P₁,₊^{1/2} L⁻¹ P₁,₊^{1/2})`.
    pub fn route_a(&self) -> Result<SingularSpectrum> {
        let s = linalg::sqrt_spd(&self.p1_plus()?)?;
        self.pencil_spectrum(&self.assemble_l()?, s.matrix(), "A")
    }

    /// Route B: `eig(P₂,₊ L⁻¹ P₂,₊)`.
    pub fn route_b(&self) -> Result<SingularSpectrum> {
        self.pencil_spectrum(&self.assemble_l()?, self.p2_plus()?.matrix(), "B")
    }

    /// Neumann-reference route with `ν' = ν + Kγ₀`, `f = 1/(b + K)`:
    /// nonzero eigenvalues of `P₁^{1/2} X P₁^{1/2}`,
    /// `X = P'(P' - F)⁻¹F = F + F(P' - F)⁻¹F`, `F = f 1_arc`, `P' = grid(1/(p_m + K))`.
    pub fn route_neumann(&self) -> Result<SingularSpectrum> {
        let k = self.config.shift_k;
        let b_prime = self.config.b + k;
        if let Some(&p0) = self.p.abs_values().iter().max_by(|a, b| a.total_cmp(b)) {
            if p0 + k >= 0.0 {
                return Err(DiscError::Config(format!("shift_k {k} must be below -p_0 = {}", -p0)));
            }
        }
        if !(b_prime > 0.0) {
            return Err(DiscError::Config(format!("b + K = {b_prime} must be positive")));
        }
        let f = 1.0 / b_prime;
        let n = self.config.grid_n;
        let arc = self.arc.indices();
        // F - P' is positive definite: -P' > 0 and F >= 0
        let mut a = self.grid(&self.p.map(|v| -1.0 / (v + k))?)?.into_matrix();
        for &i in arc {
            a[(i, i)] += f;
        }
        let chol = match a.clone().cholesky() {
            Some(c) => c,
            None => {
                let ev = linalg::eigvalsh(&a)?;
                let (lo, hi) = (*ev.last().unwrap_or(&0.0), ev[0]);
                return Err(DiscError::SingularNeumannSystem {
                    smallest: -hi,
                    largest: -lo,
                    condition: hi.abs() / lo.abs().max(f64::MIN_POSITIVE),
                });
            }
        };
        let mut e = DMatrix::zeros(n, arc.len());
        for (c, &i) in arc.iter().enumerate() {
            e[(i, c)] = 1.0;
        }
        let y = chol.solve(&e);
        // X_aa = f I - f² [(F - P')⁻¹]_aa
        let mut x = DMatrix::from_fn(arc.len(), arc.len(), |r, c| -f * f * y[(arc[r], c)]);
        for i in 0..arc.len() {
            x[(i, i)] += f;
        }
        if !linalg::is_symmetric(&x) {
            return Err(DiscError::Linalg(LinalgError::NotSymmetric { asymmetry: f64::NAN, scale: x.amax() }));
        }
        symmetrize(&mut x);
        // P₁^{1/2} X P₁^{1/2} = B X_aa Bᵀ with B = grid(√q)[:, arc]; its nonzero
        // spectrum equals that of X_aa^{1/2} (BᵀB) X_aa^{1/2} = X_aa^{1/2} P₁,₊ X_aa^{1/2}
        let sq = self.grid(&self.q.map(f64::sqrt)?)?;
        let b = DMatrix::from_fn(n, arc.len(), |r, c| sq.matrix()[(r, arc[c])]);
        let mut g = &b * &x * b.transpose();
        symmetrize(&mut g);
        let mut v = linalg::eigvalsh(&g)?;
        v.truncate(arc.len());
        Ok(SingularSpectrum::new(v, "neumann", self.config.digest())?)
    }

    /// `R = L⁻¹ + r⁺ grid(1/p) e⁺` and its singular values against `L⁻¹`.
    pub fn theorem59_remainder(&self) -> Result<RemainderReport> {
        let l = self.assemble_l()?;
        let n = l.dim();
        let inv = linalg::solve_spd(&l, &DMatrix::identity(n, n))?;
        let mut inv_sym = inv.clone();
        symmetrize(&mut inv_sym);
        let pinv = self.truncated(&self.p.map(|v| 1.0 / v)?)?;
        let mut r = &inv_sym + pinv.matrix();
        symmetrize(&mut r);
        let s_r = linalg::singular_values_matrix(&r, true)?;
        let s_l = linalg::singular_values_matrix(&inv_sym, true)?;
        let big_n = self.config.grid_n;
        let (lo, hi) = ((big_n / 32).max(1), (big_n / 4).min(n));
        let mut ratios: Vec<f64> = (lo..=hi).map(|j| s_r[j - 1] / s_l[j - 1]).collect();
        ratios.sort_by(|a, b| a.total_cmp(b));
        let trend = median_sorted(&ratios);
        Ok(RemainderReport {
            r_weighted: (1..=n).map(|j| s_r[j - 1] * j as f64).collect(),
            inverse_weighted: (1..=n).map(|j| s_l[j - 1] * j as f64).collect(),
            window: (lo, hi),
            trend,
            norm: s_r[0],
        })
    }

    /// `G^(1) = P₁,₊ - P₂,₊²` and `G^(1/2) = P₁,₊^{1/2} - P₂,₊`.
    pub fn g_corrections(&self) -> Result<CorrectionReport> {
        let p1 = self.p1_plus()?;
        let p2 = self.p2_plus()?;
        let g1 = p1.sub(&p2.compose(&p2)?)?;
        let g_half = linalg::sqrt_spd(&p1)?.sub(&p2)?;
        let s1 = linalg::singular_values(&g1, "G1")?;
        let sh = linalg::singular_values(&g_half, "G1/2")?;
        let n = self.config.grid_n;
        let trend = |v: &[f64], p: f64| {
            crate::halfline::windowed_median(v, p, n / 8, n / 4)
                / crate::halfline::windowed_median(v, p, n / 32, n / 16)
        };
        Ok(CorrectionReport {
            g1_trend: trend(s1.values(), 1.0),
            g_half_trend: trend(sh.values(), 0.5),
            g1: s1,
            g_half: sh,
        })
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemainderReport {
    /// `s_j(R) j`, `j = 1..`
    pub r_weighted: Vec<f64>,
    /// `s_j(L⁻¹) j`
    pub inverse_weighted: Vec<f64>,
    pub window: (usize, usize),
    /// Median of `s_j(R)/s_j(L⁻¹)` over the window.
    pub trend: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrectionReport {
    pub g1: SingularSpectrum,
    pub g_half: SingularSpectrum,
    pub g1_trend: f64,
    pub g_half_trend: f64,
}

/// Both Dirichlet-reference spectra.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletRefSpectra {
    pub route_a: SingularSpectrum,
    pub route_b: SingularSpectrum,
}

/// `L` for a configuration.
pub fn assemble_l(config: &DiscConfig) -> Result<GridOperator> {
    DiscModel::new(*config)?.assemble_l()
}

/// Routes A and B of the Dirichlet-reference Krein spectrum.
pub fn krein_spectrum_dirichlet_ref(config: &DiscConfig) -> Result<DirichletRefSpectra> {
    let model = DiscModel::new(*config)?;
    Ok(DirichletRefSpectra { route_a: model.route_a()?, route_b: model.route_b()? })
}

/// Neumann-reference Krein spectrum.
pub fn krein_spectrum_neumann_ref(config: &DiscConfig) -> Result<SingularSpectrum> {
    DiscModel::new(*config)?.route_neumann()
}

pub fn theorem59_remainder(config: &DiscConfig) -> Result<RemainderReport> {
    DiscModel::new(*config)?.theorem59_remainder()
}

pub fn g_corrections(config: &DiscConfig) -> Result<CorrectionReport> {
    DiscModel::new(*config)?.g_corrections()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub thetas: Vec<f64>,
    /// Largest `μ_j(θ_k) - μ_j(θ_{k+1})` over `j` and consecutive pairs, relative to `μ₁` of the larger arc.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Route-A spectra over an increasing arc grid (the last entry is usually
/// `2π`); checks `μ_j(θ) <= μ_j(θ') + 1e-8 μ₁` for `θ <= θ'`.
pub fn birman_monotonicity(config: &DiscConfig, thetas: &[f64]) -> Result<MonotonicityReport> {
    let mut sorted = thetas.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let spectra = sorted
        .iter()
        .map(|&t| DiscModel::new(DiscConfig { theta_plus: t, ..*config })?.route_a())
        .collect::<Result<Vec<_>>>()?;
    let tol = 1e-8;
    let mut worst = f64::NEG_INFINITY;
    for w in spectra.windows(2) {
        let (small, large) = (&w[0], &w[1]);
        let mu1 = large.values()[0];
        for j in 0..small.len().min(large.len()) {
            worst = worst.max((small.values()[j] - large.values()[j]) / mu1);
        }
    }
    Ok(MonotonicityReport { thetas: sorted, worst_violation: worst, tolerance: tol, holds: worst <= tol })
}
