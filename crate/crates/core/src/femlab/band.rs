//! Symmetric band matrices (lower band, column-major) and banded Cholesky.

use nalgebra::DMatrix;

/// Symmetric `n x n` matrix with `bw` sub-diagonals stored.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBand {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl SymBand {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        Self { n, bw, data: vec![0.0; n * (bw + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        if r - c > self.bw {
            None
        } else {
            Some(c * (self.bw + 1) + (r - c))
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Adds `v` to entries `(i, j)` and `(j, i)` (once on the diagonal).
    ///
    /// Panics if `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).expect("entry outside band");
        self.data[s] += v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for c in 0..self.n {
            let col = &self.data[c * (self.bw + 1)..(c + 1) * (self.bw + 1)];
            y[c] += col[0] * x[c];
            for (d, &a) in col.iter().enumerate().skip(1) {
                let r = c + d;
                if r >= self.n {
                    break;
                }
                y[r] += a * x[c];
                y[c] += a * x[r];
            }
        }
        y
    }

    /// Principal submatrix on ascending `keep`.
    pub fn restrict(&self, keep: &[usize]) -> SymBand {
        let mut bw = 0;
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in keep.iter().enumerate() {
            pos[i] = k;
        }
        for (k, &i) in keep.iter().enumerate() {
            for d in 1..=self.bw {
                let r = i + d;
                if r < self.n && pos[r] != usize::MAX && self.get(r, i) != 0.0 {
                    bw = bw.max(pos[r] - k);
                }
            }
        }
        let mut out = SymBand::zeros(keep.len(), bw);
        for (k, &i) in keep.iter().enumerate() {
            for d in 0..=self.bw {
                let r = i + d;
                if r < self.n && pos[r] != usize::MAX {
                    let v = self.get(r, i);
                    if v != 0.0 {
                        out.add(pos[r], k, v);
                    }
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// In-place `A = L Lᵀ`; `None` if a pivot is not positive.
    pub fn cholesky(&self) -> Option<BandCholesky> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = self.data.clone();
        for j in 0..n {
            let k0 = j.saturating_sub(bw);
            for k in k0..j {
                let ljk = l[k * w + (j - k)];
                if ljk == 0.0 {
                    continue;
                }
                let end = (k + bw + 1).min(n);
                for i in j..end {
                    l[j * w + (i - j)] -= l[k * w + (i - k)] * ljk;
                }
            }
            let d = l[j * w];
            if !(d > 0.0) || !d.is_finite() {
                return None;
            }
            let d = d.sqrt();
            l[j * w] = d;
            let end = (j + bw + 1).min(n);
            for i in (j + 1)..end {
                l[j * w + (i - j)] /= d;
            }
        }
        Some(BandCholesky { n, bw, l })
    }
}

/// Lower band Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `L[i, j]` (zero outside the lower band).
    pub fn factor_entry(&self, i: usize, j: usize) -> f64 {
        if i < j || i - j > self.bw {
            0.0
        } else {
            self.l[j * (self.bw + 1) + (i - j)]
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let w = self.bw + 1;
        let n = self.n;
        for j in 0..n {
            x[j] /= self.l[j * w];
            let xj = x[j];
            let end = (j + self.bw + 1).min(n);
            for i in (j + 1)..end {
                x[i] -= self.l[j * w + (i - j)] * xj;
            }
        }
        for j in (0..n).rev() {
            let end = (j + self.bw + 1).min(n);
            let mut s = x[j];
            for i in (j + 1)..end {
                s -= self.l[j * w + (i - j)] * x[i];
            }
            x[j] = s / self.l[j * w];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// `A⁻¹` as a dense matrix.
    pub fn inverse(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.n, self.n);
        let mut e = vec![0.0; self.n];
        for c in 0..self.n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[c] = 1.0;
            self.solve_in_place(&mut e);
            out.column_mut(c).copy_from_slice(&e);
        }
        out
    }

    /// `Lᵀ D L` for a dense symmetric `D`, exploiting the band of `L`.
    pub fn congruence(&self, d: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let w = self.bw + 1;
        // T = D L
        let mut t = DMatrix::zeros(n, n);
        for j in 0..n {
            let end = (j + self.bw + 1).min(n);
            for i in j..end {
                let lij = self.l[j * w + (i - j)];
                if lij != 0.0 {
                    t.column_mut(j).axpy(lij, &d.column(i), 1.0);
                }
            }
        }
        // Lᵀ T
        let tt = t.transpose();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let end = (j + self.bw + 1).min(n);
            for i in j..end {
                let lij = self.l[j * w + (i - j)];
                if lij != 0.0 {
                    out.column_mut(j).axpy(lij, &tt.column(i), 1.0);
                }
            }
        }
        out.transpose()
    }
}
