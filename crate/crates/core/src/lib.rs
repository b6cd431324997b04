//! Numerical core for computing near-zero eigenvalues of the truncated exterior
//! Dirichlet Helmholtz problem around horseshoe-shaped trapping cavities.
//!
//! The pipeline is: parametric [`geometry`] → conforming triangular [`mesh`] →
//! P1 [`fem`] matrices → boundary-integral Dirichlet-to-Neumann map on the
//! truncation circle ([`bem`]) → coupled non-Hermitian pencil solved near the
//! origin by shift-and-invert Krylov–Schur ([`linalg`]). The [`lab`] module
//! drives frequency sweeps, trajectory tracking, box counting and quasimode
//! quality estimates built from ellipse eigenfunctions ([`ellipse`],
//! [`specfun`]).
//!
//! The crate is `no_std` and only needs `alloc`. Sparse direct factorization is
//! pluggable through [`linalg::Factorize`]; a dense LU backend ships here.

#![no_std]
// `!(x > 0.0)` is used on purpose so NaN is rejected too; quadrature tables
// keep every digit of their source.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::needless_range_loop, clippy::type_complexity)]
// `num_traits::Float` imports are allowed unused: float methods become
// inherent whenever std is linked into the final build.

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bem;
pub mod ellipse;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod lab;
pub mod linalg;
pub mod mesh;
pub mod sparse;
pub mod specfun;

mod roots;

pub use error::{Error, Result};

/// Double-precision complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;

/// A point (or vector) in the plane.
pub type Point = [f64; 2];
