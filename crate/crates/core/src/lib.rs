//! Robust shrinkage covariance estimation.
//!
//! The central object is the shrinkage fixed point
//!
//! ```text
//! Σ = (1 - β) (m/N) Σ_n x_n x_n^H / (x_n^H Σ^{-1} x_n) + β I
//! ```
//!
//! which has a unique solution for `β ∈ (β̄, 1]`, `β̄ = max(0, 1 - N/m)`, always
//! satisfies `Tr(Σ^{-1}) = m`, and tends to Tyler's estimator (scaled so that
//! the trace of its inverse is `m`) as `β → 0`.
//!
//! Modules:
//! - [`linalg`]: complex Hermitian matrices, Cholesky, `HPD1` files.
//! - [`estimators`]: SCM, diagonally loaded SCM, Tyler, shrinkage and
//!   trace-penalized shrinkage fixed points.
//! - [`likelihood`]: the likelihood whose critical points are the fixed points,
//!   its gradient, curvature and profile over `β`.
//! - [`scenarios`]: Toeplitz covariances, Gaussian/SIRV sampling, STAP geometry
//!   and synthetic clutter.
//! - [`detection`]: the ANMF statistic, secondary-data selection, angle/velocity maps.
//! - [`experiments`]: Monte-Carlo and map-generation drivers used by the CLI.

pub mod detection;
pub mod error;
pub mod estimators;
pub mod experiments;
pub mod likelihood;
pub mod linalg;
pub mod scenarios;

pub use error::{Error, Result};
pub use estimators::{Normalization, SampleSet, SolverConfig, SolverReport};
pub use linalg::{ComplexVector, Hermitian, HermitianPDS, C64};
