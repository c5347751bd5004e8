//! Core algorithms for a stochastic-simulation and exact-computation workbench:
//! Mallows permutation sampling and longest-increasing-subsequence statistics,
//! q-deformed combinatorics, exclusion processes, Kac's walk on SO(n) and its
//! thermostat variant, spectral-compression experiments, and the complex
//! Ginibre ensemble's moment, correlation, and eigenvector-overlap functions.

// Link an OpenBLAS backend for the dense eigensolvers.
extern crate blas_src;

pub mod exclusion;
pub mod foursquare;
pub mod ginibre;
pub mod kacwalk;
pub mod lis;
pub mod mallows;
pub mod qcomb;
pub mod special;
pub mod spectra;
pub mod stream;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A size/shape constraint is violated (empty input, n too large, ...).
    #[error("size error: {0}")]
    Size(String),
    /// A numerical routine failed to converge or produced non-finite output.
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
