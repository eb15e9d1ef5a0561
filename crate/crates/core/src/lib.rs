//! Discrete ψ-Hilfer fractional operators on tensor grids and a
//! sub-/supersolution pipeline for Kirchhoff-type systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`psi`], [`grid`], [`fracops`]: 1D ψ-Riemann-Liouville integrals and
//!   ψ-Hilfer derivatives as dense quadrature matrices.
//! - [`field2d`]: tensor-product fields on `[0,T]²`, per-axis fractional
//!   gradients, discrete modulars/norms, and weak residuals against the
//!   nonnegative hat test cone.
//! - [`plap`]: the fractional r-Laplacian in strong and weak form, its
//!   energy functional, and the comparison principle.
//! - [`minimize`], [`precond`]: convex energy minimization (Armijo
//!   backtracking, preconditioned descent) shared by all inner solvers.
//! - [`spectral`], [`torsion`]: first eigenpair with barrier constants, and
//!   the torsion function with its sup-norm.
//! - [`kirchhoff`]: the full coupled system — hypothesis checks, explicit
//!   sub-/supersolution construction, weak-inequality verification, the
//!   (ζ, c) searches, and monotone iteration inside the ordered bracket.
//! - [`config`]: file-driven run configuration shared with the CLI.
//!
//! With the default `parallel` feature, row-wise operator assembly and
//! per-axis field sweeps run on rayon; reductions keep a fixed summation
//! order so results do not depend on worker count. Disabling the feature
//! yields a fully sequential build with identical results.

pub mod config;
pub mod error;
pub mod field2d;
pub mod fracops;
pub mod grid;
pub mod kirchhoff;
pub mod minimize;
pub mod plap;
pub mod precond;
pub mod psi;
pub mod space;
pub mod spectral;
pub mod torsion;

mod par;

pub use error::Error;
pub use field2d::GridField2D;
pub use fracops::{FracParams, OperatorMatrices1D};
pub use grid::Grid1D;
pub use psi::PsiMap;
pub use space::{Space1D, Space2D};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
