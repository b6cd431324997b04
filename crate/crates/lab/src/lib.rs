//! Spectral lab for trapping cavities: sparse factorization, parallel
//! sweeps, versioned output formats and the `trapmode` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod formats;
pub mod meshio;
pub mod runner;
pub mod solver;

pub use solver::{SparseLu, SparseLuFactorizer};
