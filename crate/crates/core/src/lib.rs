//! Contour-integral eigensolver for nonlinear eigenvalue problems `T(λ) v = 0`.
//!
//! The resolvent `T(z)⁻¹` is sampled at quadrature nodes on a closed contour,
//! the samples span a subspace containing the interior eigenvectors, and the
//! projected problem is solved by a block Hankel method. See the `examples/`
//! directory for one runnable program per capability.

// `!(x > 0.0)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cheb;
pub mod cli;
pub mod config;
pub mod contour;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod problems;
pub mod reduced;
pub mod report;
pub mod subspace;

pub use error::{Error, Result};
pub use num_complex::Complex64;
