//! Dense operators tagged with their discretization basis, symmetric
//! eigen-decomposition, singular values and SPD helpers.
//!
//! Backed by `nalgebra` (tridiagonalization + implicit QL for symmetric
//! spectra, Golub-Kahan SVD, Cholesky).

pub mod fourier;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not symmetric: max|A - A^T| = {asymmetry:e} with max|A| = {scale:e}")]
    NotSymmetric { asymmetry: f64, scale: f64 },
    #[error("basis mismatch: {left:?} vs {right:?}")]
    BasisMismatch { left: Basis, right: Basis },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not positive definite: smallest eigenvalue {smallest:e}, largest {largest:e}")]
    NotPositiveDefinite { smallest: f64, largest: f64 },
    #[error("empty operator or index set")]
    Empty,
    #[error("negative singular value {0:e}")]
    NegativeValue(f64),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Relative tolerance of the symmetry flag.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Values below this fraction of `s_1` are kept but excluded from fits.
pub const FIT_FLOOR: f64 = 1e-13;

/// Discretization basis of a [`GridOperator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    CircleGrid,
    ArcGrid,
    HalflineGrid,
    HalflinePlus,
    Modal,
    Fem,
}

/// Dense real operator with its basis tag and quadrature weight.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOperator {
    matrix: DMatrix<f64>,
    basis: Basis,
    weight: f64,
    symmetric: bool,
}

fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

fn check_square_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    if a.nrows() == 0 {
        return Err(LinalgError::Empty);
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    Ok(())
}

/// True when `max|A - A^T| <= 1e-12 max|A|`.
pub fn is_symmetric(a: &DMatrix<f64>) -> bool {
    a.nrows() == a.ncols() && asymmetry(a) <= SYMMETRY_TOL * max_abs(a)
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

impl GridOperator {
    /// Wraps a square finite matrix; the symmetry flag is detected.
    pub fn new(matrix: DMatrix<f64>, basis: Basis, weight: f64) -> Result<Self> {
        check_square_finite(&matrix)?;
        let symmetric = is_symmetric(&matrix);
        let mut op = Self { matrix, basis, weight, symmetric };
        if symmetric {
            symmetrize(&mut op.matrix);
        }
        Ok(op)
    }

    /// Like [`GridOperator::new`] but fails unless the matrix is symmetric.
    pub fn symmetric(matrix: DMatrix<f64>, basis: Basis, weight: f64) -> Result<Self> {
        check_square_finite(&matrix)?;
        let asym = asymmetry(&matrix);
        let scale = max_abs(&matrix);
        if asym > SYMMETRY_TOL * scale {
            return Err(LinalgError::NotSymmetric { asymmetry: asym, scale });
        }
        let mut matrix = matrix;
        symmetrize(&mut matrix);
        Ok(Self { matrix, basis, weight, symmetric: true })
    }

    pub fn identity(n: usize, basis: Basis, weight: f64) -> Self {
        Self { matrix: DMatrix::identity(n, n), basis, weight, symmetric: true }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn check_compatible(&self, rhs: &GridOperator) -> Result<()> {
        if self.basis != rhs.basis {
            return Err(LinalgError::BasisMismatch { left: self.basis, right: rhs.basis });
        }
        if self.dim() != rhs.dim() {
            return Err(LinalgError::DimensionMismatch { left: self.dim(), right: rhs.dim() });
        }
        Ok(())
    }

    /// `self * rhs`.
    pub fn compose(&self, rhs: &GridOperator) -> Result<GridOperator> {
        self.check_compatible(rhs)?;
        GridOperator::new(&self.matrix * &rhs.matrix, self.basis, self.weight)
    }

    pub fn add(&self, rhs: &GridOperator) -> Result<GridOperator> {
        self.check_compatible(rhs)?;
        GridOperator::new(&self.matrix + &rhs.matrix, self.basis, self.weight)
    }

    pub fn sub(&self, rhs: &GridOperator) -> Result<GridOperator> {
        self.check_compatible(rhs)?;
        GridOperator::new(&self.matrix - &rhs.matrix, self.basis, self.weight)
    }

    pub fn scaled(&self, c: f64) -> GridOperator {
        GridOperator { matrix: &self.matrix * c, ..self.clone() }
    }

    /// `self + c I`.
    pub fn shifted(&self, c: f64) -> GridOperator {
        let mut out = self.clone();
        for i in 0..out.dim() {
            out.matrix[(i, i)] += c;
        }
        out
    }

    /// Principal submatrix on `indices`, retagged with `basis`.
    pub fn restrict(&self, indices: &[usize], basis: Basis) -> Result<GridOperator> {
        if indices.is_empty() {
            return Err(LinalgError::Empty);
        }
        let n = self.dim();
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(LinalgError::DimensionMismatch { left: bad, right: n });
        }
        let k = indices.len();
        let matrix = DMatrix::from_fn(k, k, |i, j| self.matrix[(indices[i], indices[j])]);
        Ok(GridOperator { matrix, basis, weight: self.weight, symmetric: self.symmetric })
    }

    pub fn apply(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.dim() {
            return Err(LinalgError::DimensionMismatch { left: self.dim(), right: v.len() });
        }
        Ok(&self.matrix * v)
    }
}

/// Descending singular values with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    values: Vec<f64>,
    route: String,
    config_digest: String,
}

impl SingularSpectrum {
    /// Sorts descending. Negative values down to `-1e-12 max|v|` are clamped to
    /// zero as roundoff; anything more negative is rejected.
    pub fn new(mut values: Vec<f64>, route: impl Into<String>, config_digest: impl Into<String>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LinalgError::NonFinite);
        }
        let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for v in values.iter_mut() {
            if *v < 0.0 {
                if *v < -1e-12 * scale {
                    return Err(LinalgError::NegativeValue(*v));
                }
                *v = 0.0;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values, route: route.into(), config_digest: config_digest.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn route(&self) -> &str {
        &self.route
    }

    pub fn config_digest(&self) -> &str {
        &self.config_digest
    }

    /// `s_j` with 1-based `j`.
    pub fn s(&self, j: usize) -> f64 {
        self.values[j - 1]
    }

    /// Threshold below which values are excluded from fits.
    pub fn fit_floor(&self) -> f64 {
        FIT_FLOOR * self.values.first().copied().unwrap_or(0.0)
    }

    pub fn truncated(&self, count: usize) -> SingularSpectrum {
        SingularSpectrum {
            values: self.values[..count.min(self.values.len())].to_vec(),
            route: self.route.clone(),
            config_digest: self.config_digest.clone(),
        }
    }
}

/// Eigenpairs of a symmetric operator, eigenvalues descending.
#[derive(Debug, Clone)]
pub struct SymmetricEig {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

fn sorted_desc_permutation(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

fn require_symmetric(a: &DMatrix<f64>) -> Result<()> {
    check_square_finite(a)?;
    let asym = asymmetry(a);
    let scale = max_abs(a);
    if asym > SYMMETRY_TOL * scale {
        return Err(LinalgError::NotSymmetric { asymmetry: asym, scale });
    }
    Ok(())
}

/// Full symmetric eigen-decomposition, eigenvalues descending.
pub fn eigh(a: &GridOperator) -> Result<SymmetricEig> {
    if !a.symmetric {
        let asym = asymmetry(&a.matrix);
        return Err(LinalgError::NotSymmetric { asymmetry: asym, scale: max_abs(&a.matrix) });
    }
    eigh_matrix(&a.matrix)
}

/// [`eigh`] on a bare matrix.
pub fn eigh_matrix(a: &DMatrix<f64>) -> Result<SymmetricEig> {
    require_symmetric(a)?;
    let e = a.clone().symmetric_eigen();
    let perm = sorted_desc_permutation(e.eigenvalues.as_slice());
    let values = perm.iter().map(|&i| e.eigenvalues[i]).collect();
    let n = a.nrows();
    let vectors = DMatrix::from_fn(n, n, |r, c| e.eigenvectors[(r, perm[c])]);
    Ok(SymmetricEig { values, vectors })
}

/// Eigenvalues of a symmetric matrix, descending.
pub fn eigvalsh(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    require_symmetric(a)?;
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

/// Singular values, descending. Symmetric operators use `|eig|`.
pub fn singular_values(a: &GridOperator, route: &str) -> Result<SingularSpectrum> {
    let values = singular_values_matrix(&a.matrix, a.symmetric)?;
    SingularSpectrum::new(values, route, "")
}

/// Singular values of a (possibly rectangular) matrix, descending.
pub fn singular_values_matrix(a: &DMatrix<f64>, symmetric: bool) -> Result<Vec<f64>> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    if a.is_empty() {
        return Err(LinalgError::Empty);
    }
    let mut v: Vec<f64> = if symmetric && a.is_square() && is_symmetric(a) {
        a.clone().symmetric_eigenvalues().iter().map(|x| x.abs()).collect()
    } else {
        a.clone().svd(false, false).singular_values.iter().copied().collect()
    };
    v.sort_by(|x, y| y.total_cmp(x));
    Ok(v)
}

/// Spectral norm; symmetric matrices use `max |eig|`.
pub fn norm2(a: &DMatrix<f64>) -> Result<f64> {
    Ok(singular_values_matrix(a, true)?.first().copied().unwrap_or(0.0))
}

fn indefinite(a: &DMatrix<f64>) -> LinalgError {
    match eigvalsh(a) {
        Ok(v) => LinalgError::NotPositiveDefinite {
            smallest: *v.last().unwrap_or(&f64::NAN),
            largest: *v.first().unwrap_or(&f64::NAN),
        },
        Err(e) => e,
    }
}

/// Lower Cholesky factor `C` with `A = C C^T`.
pub fn cholesky_lower(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    require_symmetric(a)?;
    match a.clone().cholesky() {
        Some(c) => Ok(c.unpack()),
        None => Err(indefinite(a)),
    }
}

/// Solves `A X = B` for SPD `A`.
pub fn solve_spd(a: &GridOperator, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if b.nrows() != a.dim() {
        return Err(LinalgError::DimensionMismatch { left: a.dim(), right: b.nrows() });
    }
    require_symmetric(&a.matrix)?;
    match a.matrix.clone().cholesky() {
        Some(c) => Ok(c.solve(b)),
        None => Err(indefinite(&a.matrix)),
    }
}

/// Symmetric positive square root.
pub fn sqrt_spd(a: &GridOperator) -> Result<GridOperator> {
    let e = eigh(a)?;
    let largest = e.values[0];
    let smallest = *e.values.last().unwrap_or(&0.0);
    if !(smallest > 0.0) {
        return Err(LinalgError::NotPositiveDefinite { smallest, largest });
    }
    let n = a.dim();
    let mut scaled = e.vectors.clone();
    for (c, v) in e.values.iter().enumerate() {
        let s = v.sqrt();
        for r in 0..n {
            scaled[(r, c)] *= s;
        }
    }
    let root = &scaled * e.vectors.transpose();
    GridOperator::symmetric(root, a.basis, a.weight)
}
