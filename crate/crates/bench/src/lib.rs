//! Shared fixtures for the benchmarks.

use zaremba_core::disc::DiscConfig;
use zaremba_core::femlab::{self, BoundaryCondition, FemSystem, Geometry};
use zaremba_core::halfline::{HalflineGrid, PlusMask};

/// Default disc model at `grid_n = n`, half-circle arc.
pub fn disc_config(n: usize) -> DiscConfig {
    DiscConfig { grid_n: n, ..DiscConfig::default() }
}

/// Half-line grid on `[-20, 20)` with its plus mask.
pub fn halfline_setup(n: usize) -> (HalflineGrid, PlusMask) {
    let grid = HalflineGrid::new(20.0, n).expect("power-of-two grid");
    let mask = PlusMask::for_grid(&grid);
    (grid, mask)
}

/// Mixed half-arc system on a disc mesh.
pub fn fem_system(n_r: usize, n_theta: usize) -> FemSystem {
    let mesh = femlab::build_mesh(Geometry::Disc, n_r, n_theta).expect("valid mesh");
    femlab::assemble(&mesh, 1.0, BoundaryCondition::Mixed { theta_plus: std::f64::consts::PI, b: 0.0 }).expect("SPD")
}
