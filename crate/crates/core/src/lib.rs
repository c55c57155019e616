//! Numerical laboratory for resolvent differences of the Zaremba problem
//! (Dirichlet on one boundary part, Neumann/Robin on the rest) for `-Δ + α²`.
//!
//! * [`specfun`]: Bessel `I_m`, `J_m` zeros, Gamma, quadrature.
//! * [`linalg`]: tagged dense operators, symmetric spectra, singular values.
//! * [`halfline`]: FFT symbol calculus and Wiener-Hopf factors on the line.
//! * [`disc`]: exact Fourier-modal DtN calculus on the unit disc.
//! * [`femlab`]: P1 finite elements on polar meshes as an independent oracle.
//! * [`experiments`]: Weyl constants, fits, configs and report writers.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod disc;
pub mod experiments;
pub mod femlab;
pub mod halfline;
pub mod linalg;
pub mod specfun;

pub use disc::{ArcMask, DiscConfig, ModalOperator};
pub use experiments::{ConstantsReport, WeylFitResult};
pub use femlab::{FemMesh, FemSystem};
pub use halfline::{HalflineGrid, PlusMask, SymbolSpec};
pub use linalg::{Basis, GridOperator, SingularSpectrum};
