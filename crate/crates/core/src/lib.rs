//! Distributed orthogonal matching pursuit for sparse linear regression over
//! a star network.
//!
//! - [`matrix`] and [`omp`]: designs, restricted least squares, single-machine OMP.
//! - [`protocol`]: the DS, DJ, DJF and DC protocols with a wire codec and an
//!   exact communication ledger.
//! - [`theory`]: closed-form recovery quantities (thresholds, machine counts).
//!   Every `log d` there is a natural logarithm; ledger bits use `ceil(log2 d)`.
//! - [`datagen`] and [`experiments`]: seeded synthetic problems and Monte Carlo sweeps.

pub mod config;
pub mod datagen;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod omp;
pub mod protocol;
pub mod theory;

pub use error::{Error, Result};
pub use matrix::{DesignMatrix, RegressionShard, SparseVector, SupportSet};
