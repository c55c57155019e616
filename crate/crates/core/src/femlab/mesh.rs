//! Polar-structured triangulations of the unit disc and upper half-disc.

use std::f64::consts::PI;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{FemError, Result};

/// Minimum admissible triangle area.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Geometry {
    Disc,
    HalfDisc,
}

/// Boundary conditions for [`super::assemble`].
///
/// On the disc, `Mixed` puts the Robin condition on boundary nodes with
/// polar angle in the open interval `(0, theta_plus)`; `theta_plus >= 2π`
/// covers the whole circle. On the half-disc, `Mixed` puts it on the open
/// diameter and `theta_plus` is ignored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BoundaryCondition {
    Dirichlet,
    Robin { b: f64 },
    Mixed { theta_plus: f64, b: f64 },
}

impl BoundaryCondition {
    pub fn robin_coefficient(&self) -> f64 {
        match *self {
            BoundaryCondition::Dirichlet => 0.0,
            BoundaryCondition::Robin { b } | BoundaryCondition::Mixed { b, .. } => b,
        }
    }
}

/// Boundary node split: `plus` carries the Robin/Neumann condition, `minus`
/// the Dirichlet condition. Both ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryPartition {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    /// Boundary edges carrying the Robin mass.
    pub robin_edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FemMesh {
    geometry: Geometry,
    n_r: usize,
    n_theta: usize,
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
}

impl FemMesh {
    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn ring_len(&self) -> usize {
        match self.geometry {
            Geometry::Disc => self.n_theta,
            Geometry::HalfDisc => self.n_theta + 1,
        }
    }

    /// Node index of ring `k` (1-based), angular index `j`.
    pub fn ring_node(&self, k: usize, j: usize) -> usize {
        1 + (k - 1) * self.ring_len() + j
    }

    /// Polar angle of angular index `j` on any ring.
    pub fn angle(&self, j: usize) -> f64 {
        match self.geometry {
            Geometry::Disc => 2.0 * PI * j as f64 / self.n_theta as f64,
            Geometry::HalfDisc => PI * j as f64 / self.n_theta as f64,
        }
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        signed_area(self.nodes[a], self.nodes[b], self.nodes[c])
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Exact area of the continuum domain.
    pub fn exact_area(&self) -> f64 {
        match self.geometry {
            Geometry::Disc => PI,
            Geometry::HalfDisc => PI / 2.0,
        }
    }

    /// Boundary partition for `bc`; interface nodes are Dirichlet.
    pub fn partition(&self, bc: &BoundaryCondition) -> BoundaryPartition {
        let outer = |j: usize| self.ring_node(self.n_r, j);
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        let mut robin_edges = Vec::new();
        match self.geometry {
            Geometry::Disc => {
                let nt = self.n_theta;
                // Neumann/Robin arc length; infinite means the whole circle.
                let arc = match *bc {
                    BoundaryCondition::Dirichlet => 0.0,
                    BoundaryCondition::Robin { .. } => f64::INFINITY,
                    BoundaryCondition::Mixed { theta_plus, .. } if theta_plus >= 2.0 * PI - 1e-12 => f64::INFINITY,
                    BoundaryCondition::Mixed { theta_plus, .. } => theta_plus,
                };
                let tol = 1e-12;
                let step = 2.0 * PI / nt as f64;
                let node_in =
                    |j: usize| arc.is_infinite() || (step * (j as f64) > tol && step * (j as f64) < arc - tol);
                let edge_in = |j: usize| arc.is_infinite() || step * (j as f64 + 0.5) < arc;
                for j in 0..nt {
                    if node_in(j) {
                        plus.push(outer(j));
                    } else {
                        minus.push(outer(j));
                    }
                    if edge_in(j) {
                        robin_edges.push([outer(j), outer((j + 1) % nt)]);
                    }
                }
            }
            Geometry::HalfDisc => {
                let nt = self.n_theta;
                let mut diameter: Vec<usize> = vec![0];
                for k in 1..self.n_r {
                    diameter.push(self.ring_node(k, 0));
                    diameter.push(self.ring_node(k, nt));
                }
                let mut diameter_edges = vec![[0, self.ring_node(1, 0)], [0, self.ring_node(1, nt)]];
                for k in 1..self.n_r {
                    diameter_edges.push([self.ring_node(k, 0), self.ring_node(k + 1, 0)]);
                    diameter_edges.push([self.ring_node(k, nt), self.ring_node(k + 1, nt)]);
                }
                let arc: Vec<usize> = (0..=nt).map(outer).collect();
                let arc_edges: Vec<[usize; 2]> = (0..nt).map(|j| [outer(j), outer(j + 1)]).collect();
                match *bc {
                    BoundaryCondition::Dirichlet => {
                        minus.extend(diameter);
                        minus.extend(arc);
                    }
                    BoundaryCondition::Robin { .. } => {
                        plus.extend(diameter);
                        plus.extend(arc);
                        robin_edges.extend(diameter_edges);
                        robin_edges.extend(arc_edges);
                    }
                    BoundaryCondition::Mixed { .. } => {
                        plus.extend(diameter);
                        minus.extend(arc);
                        robin_edges.extend(diameter_edges);
                    }
                }
            }
        }
        plus.sort_unstable();
        minus.sort_unstable();
        BoundaryPartition { plus, minus, robin_edges }
    }

    /// Writes `x y` node lines and zero-based `i j k` triangle lines.
    pub fn write_text<W1: Write, W2: Write>(&self, nodes: &mut W1, triangles: &mut W2) -> io::Result<()> {
        for [x, y] in &self.nodes {
            writeln!(nodes, "{x:.17e} {y:.17e}")?;
        }
        for [i, j, k] in &self.triangles {
            writeln!(triangles, "{i} {j} {k}")?;
        }
        Ok(())
    }

    /// Exports to `<dir>/<stem>.nodes` and `<dir>/<stem>.tri`.
    pub fn export(&self, dir: &Path, stem: &str) -> io::Result<()> {
        let mut n = io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.nodes")))?);
        let mut t = io::BufWriter::new(std::fs::File::create(dir.join(format!("{stem}.tri")))?);
        self.write_text(&mut n, &mut t)?;
        n.flush()?;
        t.flush()
    }
}

fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Polar mesh with uniform rings `r_k = k / n_r` and a centre fan.
pub fn build_mesh(geometry: Geometry, n_r: usize, n_theta: usize) -> Result<FemMesh> {
    if n_r < 4 || n_theta < 8 {
        return Err(FemError::Mesh(format!("need n_r >= 4 and n_theta >= 8, got {n_r} x {n_theta}")));
    }
    let mut mesh = FemMesh { geometry, n_r, n_theta, nodes: vec![[0.0, 0.0]], triangles: Vec::new() };
    let ring_len = mesh.ring_len();
    for k in 1..=n_r {
        let r = k as f64 / n_r as f64;
        for j in 0..ring_len {
            let a = mesh.angle(j);
            mesh.nodes.push([r * a.cos(), r * a.sin()]);
        }
    }
    let sectors = n_theta;
    let next = |j: usize| match geometry {
        Geometry::Disc => (j + 1) % n_theta,
        Geometry::HalfDisc => j + 1,
    };
    for j in 0..sectors {
        mesh.triangles.push([0, mesh.ring_node(1, j), mesh.ring_node(1, next(j))]);
    }
    for k in 1..n_r {
        for j in 0..sectors {
            let a = mesh.ring_node(k, j);
            let b = mesh.ring_node(k, next(j));
            let c = mesh.ring_node(k + 1, next(j));
            let d = mesh.ring_node(k + 1, j);
            mesh.triangles.push([a, d, c]);
            mesh.triangles.push([a, c, b]);
        }
    }
    for t in 0..mesh.triangles.len() {
        let area = mesh.triangle_area(t);
        if area <= MIN_TRIANGLE_AREA {
            return Err(FemError::Mesh(format!("triangle {t} has area {area:e}")));
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn areas_close_to_exact() {
        for g in [Geometry::Disc, Geometry::HalfDisc] {
            let m = build_mesh(g, 32, 64).unwrap();
            let rel = (m.total_area() - m.exact_area()).abs() / m.exact_area();
            assert!(rel < 0.01, "{g:?}: {rel}");
        }
    }

    #[test]
    fn rejects_coarse() {
        assert!(build_mesh(Geometry::Disc, 3, 64).is_err());
        assert!(build_mesh(Geometry::Disc, 8, 7).is_err());
    }

    #[test]
    fn partition_covers_boundary_once() {
        let m = build_mesh(Geometry::Disc, 4, 16).unwrap();
        let p = m.partition(&BoundaryCondition::Mixed { theta_plus: PI, b: 0.0 });
        assert_eq!(p.plus.len() + p.minus.len(), 16);
        // open arc (0, π): angular indices 1..=7
        assert_eq!(p.plus.len(), 7);
        assert_eq!(p.robin_edges.len(), 8);
        let h = build_mesh(Geometry::HalfDisc, 4, 8).unwrap();
        let p = h.partition(&BoundaryCondition::Mixed { theta_plus: 0.0, b: 0.0 });
        assert_eq!(p.plus.len(), 7);
        assert_eq!(p.minus.len(), 9);
    }

    #[test]
    fn export_format() {
        let m = build_mesh(Geometry::HalfDisc, 4, 8).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        m.write_text(&mut a, &mut b).unwrap();
        let a = String::from_utf8(a).unwrap();
        let b = String::from_utf8(b).unwrap();
        assert_eq!(a.lines().count(), m.node_count());
        assert_eq!(b.lines().count(), m.triangles().len());
        assert_eq!(b.lines().next().unwrap(), "0 1 2");
    }
}
