//! P1 finite elements for `-Δ + α²` on polar meshes of the disc and half-disc.
//!
//! Dirichlet nodes are eliminated; the Robin term `b ∫ u v` is assembled on
//! the boundary edges of `Σ₊`. Spectra of the realizations come from the
//! generalized pencil `(K, M)`; resolvent differences use dense inverses.

mod band;
mod mesh;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg::{self, LinalgError, SingularSpectrum};
use crate::specfun::{self, SpecfunError};

pub use band::{BandCholesky, SymBand};
pub use mesh::{build_mesh, BoundaryCondition, BoundaryPartition, FemMesh, Geometry, MIN_TRIANGLE_AREA};

/// Node budget for dense resolvent computations.
pub const DENSE_NODE_LIMIT: usize = 4000;

/// Tolerance on negative resolvent-difference eigenvalues.
pub const NEGATIVE_TOL: f64 = 1e-10;

const SUBSPACE_TOL: f64 = 1e-13;
const SUBSPACE_MAX_ITER: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("invalid mesh: {0}")]
    Mesh(String),
    #[error("stiffness matrix is not positive definite ({dof} free dofs)")]
    Indefinite { dof: usize },
    #[error("{nodes} nodes exceed the dense budget of {limit}")]
    Budget { nodes: usize, limit: usize },
    #[error("requested {count} eigenvalues but only {dof} free dofs (need count <= dof/4)")]
    Count { count: usize, dof: usize },
    #[error("subspace iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("lambda = {lambda} is at or too near an eigenvalue")]
    AtEigenvalue { lambda: f64 },
    #[error("resolvent difference has eigenvalue {value:e} below -{tol:e}")]
    Negative { value: f64, tol: f64 },
    #[error("systems are built on different meshes")]
    MeshMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

pub type Result<T> = std::result::Result<T, FemError>;

/// Assembled pencil of one realization.
#[derive(Debug, Clone)]
pub struct FemSystem {
    mesh: FemMesh,
    alpha: f64,
    bc: BoundaryCondition,
    partition: BoundaryPartition,
    stiffness: SymBand,
    mass: SymBand,
    free: Vec<usize>,
    k_free: SymBand,
    m_free: SymBand,
    k_factor: BandCholesky,
}

impl FemSystem {
    pub fn mesh(&self) -> &FemMesh {
        &self.mesh
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn boundary_condition(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn partition(&self) -> &BoundaryPartition {
        &self.partition
    }

    /// Full-node stiffness `∫∇u·∇v + α²∫uv (+ b ∫_{Σ₊} uv)`.
    pub fn stiffness(&self) -> &SymBand {
        &self.stiffness
    }

    /// Full-node consistent mass matrix.
    pub fn mass(&self) -> &SymBand {
        &self.mass
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    pub fn stiffness_free(&self) -> &SymBand {
        &self.k_free
    }

    pub fn mass_free(&self) -> &SymBand {
        &self.m_free
    }

    /// `E K_F⁻¹ Eᵀ` on the full node set.
    pub fn resolvent_at_zero(&self) -> DMatrix<f64> {
        self.embed(&self.k_factor.inverse())
    }

    /// `E (K_F - λ M_F)⁻¹ Eᵀ` on the full node set (dense LU).
    pub fn resolvent(&self, lambda: f64) -> Result<DMatrix<f64>> {
        if lambda == 0.0 {
            return Ok(self.resolvent_at_zero());
        }
        let a = self.k_free.to_dense() - self.m_free.to_dense() * lambda;
        let nf = a.nrows();
        let inv = a
            .lu()
            .solve(&DMatrix::identity(nf, nf))
            .filter(|x| x.iter().all(|v| v.is_finite()))
            .ok_or(FemError::AtEigenvalue { lambda })?;
        let scale = inv.amax();
        let res = (self.k_free.to_dense() - self.m_free.to_dense() * lambda) * &inv - DMatrix::identity(nf, nf);
        if res.amax() > 1e-6 || scale > 1e14 {
            return Err(FemError::AtEigenvalue { lambda });
        }
        Ok(self.embed(&inv))
    }

    fn embed(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.mesh.node_count();
        let mut out = DMatrix::zeros(n, n);
        for (a, &i) in self.free.iter().enumerate() {
            for (b, &j) in self.free.iter().enumerate() {
                out[(i, j)] = g[(a, b)];
            }
        }
        out
    }
}

/// Assembles `(K, M)` and eliminates Dirichlet nodes; fails unless `K_F` is SPD.
pub fn assemble(mesh: &FemMesh, alpha: f64, bc: BoundaryCondition) -> Result<FemSystem> {
    if !alpha.is_finite() || !bc.robin_coefficient().is_finite() {
        return Err(FemError::Mesh("non-finite alpha or b".into()));
    }
    let n = mesh.node_count();
    let partition = mesh.partition(&bc);
    let bw = mesh.triangles().iter().map(|t| t.iter().max().unwrap() - t.iter().min().unwrap()).max().unwrap_or(0);
    let mut stiffness = SymBand::zeros(n, bw);
    let mut mass = SymBand::zeros(n, bw);
    let a2 = alpha * alpha;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        let p: Vec<[f64; 2]> = tri.iter().map(|&i| mesh.nodes()[i]).collect();
        let grad: Vec<[f64; 2]> = (0..3)
            .map(|i| {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                [(p[j][1] - p[k][1]) / (2.0 * area), (p[k][0] - p[j][0]) / (2.0 * area)]
            })
            .collect();
        for i in 0..3 {
            for j in 0..=i {
                let (gi, gj) = (tri[i], tri[j]);
                let (r, c) = if gi >= gj { (gi, gj) } else { (gj, gi) };
                let m = if i == j { area / 6.0 } else { area / 12.0 };
                let k = area * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
                mass.add(r, c, m);
                stiffness.add(r, c, k + a2 * m);
            }
        }
    }
    let b = bc.robin_coefficient();
    if b != 0.0 {
        for &[i, j] in &partition.robin_edges {
            let (pi, pj) = (mesh.nodes()[i], mesh.nodes()[j]);
            let len = ((pi[0] - pj[0]).powi(2) + (pi[1] - pj[1]).powi(2)).sqrt();
            stiffness.add(i, i, b * len / 3.0);
            stiffness.add(j, j, b * len / 3.0);
            stiffness.add(i.max(j), i.min(j), b * len / 6.0);
        }
    }
    let mut dirichlet = vec![false; n];
    for &i in &partition.minus {
        dirichlet[i] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !dirichlet[i]).collect();
    let k_free = stiffness.restrict(&free);
    let m_free = mass.restrict(&free);
    let k_factor = k_free.cholesky().ok_or(FemError::Indefinite { dof: free.len() })?;
    Ok(FemSystem { mesh: mesh.clone(), alpha, bc, partition, stiffness, mass, free, k_free, m_free, k_factor })
}

/// Deterministic pseudo-random start block entry.
fn start_entry(i: usize, c: usize) -> f64 {
    let mut z = (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (c as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

/// Dense Rayleigh-Ritz for `(kr, mr)`: ascending values and M-orthonormal vectors.
fn ritz(kr: &DMatrix<f64>, mr: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let l = linalg::cholesky_lower(mr)?;
    let li = l
        .solve_lower_triangular(&DMatrix::identity(l.nrows(), l.nrows()))
        .ok_or(FemError::Linalg(LinalgError::NotPositiveDefinite { smallest: 0.0, largest: 0.0 }))?;
    let mut c = &li * kr * li.transpose();
    c = (&c + c.transpose()) * 0.5;
    let eig = linalg::eigh_matrix(&c)?;
    // eigh_matrix is descending; reverse to ascending.
    let p = eig.values.len();
    let values: Vec<f64> = eig.values.iter().rev().copied().collect();
    let mut v = DMatrix::zeros(p, p);
    for (dst, src) in (0..p).zip((0..p).rev()) {
        v.set_column(dst, &eig.vectors.column(src));
    }
    Ok((values, li.transpose() * v))
}

/// Smallest `count` eigenvalues of the pencil `(K_F, M_F)`, ascending.
///
/// Block subspace iteration on `K_F⁻¹ M_F` with Rayleigh-Ritz projection.
pub fn realization_spectrum(sys: &FemSystem, count: usize) -> Result<Vec<f64>> {
    let nf = sys.free.len();
    if count == 0 || count > nf / 4 {
        return Err(FemError::Count { count, dof: nf });
    }
    let p = (2 * count + 8).min(nf);
    let mut x = DMatrix::from_fn(nf, p, start_entry);
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..SUBSPACE_MAX_ITER {
        let mut y = DMatrix::zeros(nf, p);
        let mut ky = DMatrix::zeros(nf, p);
        let mut my = DMatrix::zeros(nf, p);
        for c in 0..p {
            let col: Vec<f64> = x.column(c).iter().copied().collect();
            let sol = sys.k_factor.solve(&sys.m_free.matvec(&col));
            ky.column_mut(c).copy_from_slice(&sys.k_free.matvec(&sol));
            my.column_mut(c).copy_from_slice(&sys.m_free.matvec(&sol));
            y.column_mut(c).copy_from_slice(&sol);
        }
        let kr = y.transpose() * &ky;
        let mr = y.transpose() * &my;
        let (values, q) = ritz(&((&kr + kr.transpose()) * 0.5), &((&mr + mr.transpose()) * 0.5))?;
        x = &y * q;
        let head = values[..count].to_vec();
        if let Some(old) = &prev {
            let change = head.iter().zip(old).map(|(a, b)| ((a - b) / a).abs()).fold(0.0, f64::max);
            if change < SUBSPACE_TOL {
                return Ok(head);
            }
        }
        prev = Some(head);
    }
    Err(FemError::NoConvergence { iterations: SUBSPACE_MAX_ITER })
}

/// Eigenvalues of `M^{1/2}(G_mixed - G_dirichlet)M^{1/2}`, top `count`, descending.
///
/// Computed as `eig(Lᵀ D L)` with `M = L Lᵀ` (banded).
pub fn resolvent_difference_spectrum(
    mesh: &FemMesh,
    alpha: f64,
    theta_plus: f64,
    b: f64,
    count: usize,
) -> Result<SingularSpectrum> {
    let n = mesh.node_count();
    if n > DENSE_NODE_LIMIT {
        return Err(FemError::Budget { nodes: n, limit: DENSE_NODE_LIMIT });
    }
    let mixed = assemble(mesh, alpha, BoundaryCondition::Mixed { theta_plus, b })?;
    let dir = assemble(mesh, alpha, BoundaryCondition::Dirichlet)?;
    let mut d = mixed.resolvent_at_zero() - dir.resolvent_at_zero();
    d = (&d + d.transpose()) * 0.5;
    let lm = mixed.mass.cholesky().ok_or(FemError::Indefinite { dof: n })?;
    let mut c = lm.congruence(&d);
    c = (&c + c.transpose()) * 0.5;
    let values = linalg::eigvalsh(&c)?;
    if let Some(&worst) = values.last() {
        if worst < -NEGATIVE_TOL {
            return Err(FemError::Negative { value: worst, tol: NEGATIVE_TOL });
        }
    }
    let top: Vec<f64> = values.into_iter().take(count).map(|v| v.max(0.0)).collect();
    let digest = format!("fem:{:?}:{}x{}:a={alpha}:t={theta_plus}:b={b}", mesh.geometry(), mesh.n_r(), mesh.n_theta());
    Ok(SingularSpectrum::new(top, "fem-dense", digest)?)
}

/// Norms of both sides of the λ-shift identity and their difference.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LambdaShiftReport {
    pub lhs_norm: f64,
    pub residual: f64,
    /// `residual / lhs_norm` (or `residual` when the LHS vanishes).
    pub relative: f64,
}

fn shift_report(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) -> LambdaShiftReport {
    let lhs_norm = lhs.norm();
    let residual = (lhs - rhs).norm();
    let relative = if lhs_norm > 0.0 { residual / lhs_norm } else { residual };
    LambdaShiftReport { lhs_norm, residual, relative }
}

/// `(B-λ)⁻¹ - (B₁-λ)⁻¹` against `(1 + λ(B₁-λ)⁻¹)(B⁻¹ - B₁⁻¹)(1 + λ(B-λ)⁻¹)`
/// for invertible symmetric matrices.
pub fn lambda_shift_matrices(b: &DMatrix<f64>, b1: &DMatrix<f64>, lambda: f64) -> Result<LambdaShiftReport> {
    let n = b.nrows();
    if b.ncols() != n || b1.nrows() != n || b1.ncols() != n {
        return Err(FemError::Linalg(LinalgError::DimensionMismatch { left: n, right: b1.nrows() }));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let inv = |a: DMatrix<f64>| a.try_inverse().ok_or(FemError::AtEigenvalue { lambda });
    let r = inv(b - &id * lambda)?;
    let r1 = inv(b1 - &id * lambda)?;
    let d0 = inv(b.clone())? - inv(b1.clone())?;
    let lhs = &r - &r1;
    let rhs = (&id + &r1 * lambda) * d0 * (&id + &r * lambda);
    Ok(shift_report(&lhs, &rhs))
}

/// λ-shift identity on the FEM pseudo-resolvents `G(λ) = E(K_F - λM_F)⁻¹Eᵀ`:
/// `G(λ) - G₁(λ) = (I + λ G₁(λ) M)(G(0) - G₁(0))(I + λ M G(λ))`.
pub fn lambda_shift_check(sys_mixed: &FemSystem, sys_dirichlet: &FemSystem, lambda: f64) -> Result<LambdaShiftReport> {
    let n = sys_mixed.mesh.node_count();
    if sys_dirichlet.mesh != sys_mixed.mesh {
        return Err(FemError::MeshMismatch);
    }
    if n > DENSE_NODE_LIMIT {
        return Err(FemError::Budget { nodes: n, limit: DENSE_NODE_LIMIT });
    }
    let m = sys_mixed.mass.to_dense();
    let g = sys_mixed.resolvent(lambda)?;
    let g1 = sys_dirichlet.resolvent(lambda)?;
    let d0 = sys_mixed.resolvent_at_zero() - sys_dirichlet.resolvent_at_zero();
    let id = DMatrix::<f64>::identity(n, n);
    let lhs = &g - &g1;
    let rhs = (&id + &g1 * &m * lambda) * d0 * (&id + &m * &g * lambda);
    Ok(shift_report(&lhs, &rhs))
}

/// Exact mixed half-disc spectrum `{j_{m,k}² + α² : m ≥ 0}` up to `cutoff`, ascending.
pub fn halfdisc_mixed_exact(alpha: f64, cutoff: f64) -> Result<Vec<f64>> {
    let a2 = alpha * alpha;
    if !(cutoff > a2) {
        return Ok(Vec::new());
    }
    let kmax = (cutoff - a2).sqrt();
    let mut out = Vec::new();
    for m in 0..=specfun::MAX_J_ZERO_ORDER {
        // j_{m,k} > (k + m/2 - 1/4)π - O(1/k); two spare zeros suffice.
        let count = ((kmax / std::f64::consts::PI) + 2.0).ceil() as u32;
        let zeros = specfun::bessel_j_zeros(m, count)?;
        let before = out.len();
        out.extend(zeros.iter().map(|z| z.value * z.value + a2).filter(|&v| v <= cutoff));
        if out.len() == before {
            break;
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// `N(Λ) / (C_A Λ)` for the exact half-disc mixed spectrum, `C_A = 1/8`.
pub fn halfdisc_weyl_ratio(alpha: f64, cutoff: f64) -> Result<f64> {
    let count = halfdisc_mixed_exact(alpha, cutoff)?.len();
    Ok(count as f64 / (cutoff / 8.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patch_test() {
        let mesh = build_mesh(Geometry::Disc, 6, 16).unwrap();
        let sys = assemble(&mesh, 1.3, BoundaryCondition::Robin { b: 0.0 }).unwrap();
        let ones = vec![1.0; mesh.node_count()];
        let k1 = sys.stiffness().matvec(&ones);
        let m1 = sys.mass().matvec(&ones);
        for (a, b) in k1.iter().zip(&m1) {
            assert!((a - 1.69 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_row_sums() {
        let mesh = build_mesh(Geometry::HalfDisc, 4, 8).unwrap();
        let sys = assemble(&mesh, 1.0, BoundaryCondition::Dirichlet).unwrap();
        let rows = sys.mass().matvec(&vec![1.0; mesh.node_count()]);
        let mut adj = vec![0.0; mesh.node_count()];
        for (t, tri) in mesh.triangles().iter().enumerate() {
            for &i in tri {
                adj[i] += mesh.triangle_area(t) / 3.0;
            }
        }
        for (a, b) in rows.iter().zip(&adj) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn shift_diagonal_example() {
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        let b1 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 4.0]));
        let r = lambda_shift_matrices(&b, &b1, 1.0).unwrap();
        assert!((r.lhs_norm - 1.0 / 6.0).abs() < 1e-15);
        assert!(r.residual < 1e-15);
    }

    #[test]
    fn shift_at_eigenvalue_rejected() {
        let b = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 3.0]));
        assert!(matches!(lambda_shift_matrices(&b, &b, 2.0), Err(FemError::AtEigenvalue { .. })));
    }

    #[test]
    fn robin_equals_full_mixed() {
        let mesh = build_mesh(Geometry::Disc, 5, 12).unwrap();
        let r = assemble(&mesh, 1.0, BoundaryCondition::Robin { b: 0.7 }).unwrap();
        let m =
            assemble(&mesh, 1.0, BoundaryCondition::Mixed { theta_plus: 2.0 * std::f64::consts::PI, b: 0.7 }).unwrap();
        assert_eq!(r.stiffness(), m.stiffness());
        assert_eq!(r.free_dofs(), m.free_dofs());
    }

    #[test]
    fn count_bound() {
        let mesh = build_mesh(Geometry::Disc, 4, 8).unwrap();
        let sys = assemble(&mesh, 1.0, BoundaryCondition::Dirichlet).unwrap();
        assert!(matches!(realization_spectrum(&sys, 100), Err(FemError::Count { .. })));
    }

    #[test]
    fn budget_enforced() {
        let mesh = build_mesh(Geometry::Disc, 64, 128).unwrap();
        assert!(matches!(resolvent_difference_spectrum(&mesh, 1.0, 1.0, 0.0, 5), Err(FemError::Budget { .. })));
    }

    #[test]
    fn exact_halfdisc_head() {
        let v = halfdisc_mixed_exact(1.0, 32.0).unwrap();
        let want = [6.78319, 15.68198, 27.37459, 31.47128];
        assert_eq!(v.len(), 4);
        for (a, b) in v.iter().zip(want) {
            assert!((a - b).abs() < 1e-5 * b, "{a} vs {b}");
        }
    }
}
