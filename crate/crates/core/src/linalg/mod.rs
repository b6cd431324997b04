//! Dense complex linear algebra, the factorization interface used by the
//! coupled solver, and shift-invert eigenvalue computation.

mod dense;
mod krylov;
mod schur;

pub use dense::{DMat, DenseLu};
pub use krylov::{krylov_schur, KrylovOptions, KrylovResult, RitzPair, DEFAULT_SEED};
pub use schur::{schur, Schur};

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::sparse::Csr;
use crate::{Error, Result, C64};

/// A factorized square matrix that can solve in place.
pub trait Factorize {
    fn dim(&self) -> usize;
    fn solve_in_place(&self, rhs: &mut [C64]) -> Result<()>;
    /// Reciprocal condition estimate, when the backend offers one.
    fn rcond(&self) -> Option<f64> {
        None
    }
}

/// Produces factorizations of sparse complex matrices.
pub trait Factorizer {
    type Factor: Factorize;
    fn factorize(&self, a: &Csr<C64>) -> Result<Self::Factor>;
}

impl Factorize for DenseLu {
    fn dim(&self) -> usize {
        DenseLu::dim(self)
    }

    fn solve_in_place(&self, rhs: &mut [C64]) -> Result<()> {
        DenseLu::solve_in_place(self, rhs);
        Ok(())
    }

    fn rcond(&self) -> Option<f64> {
        Some(DenseLu::rcond(self))
    }
}

/// Dense LU of the sparse input; intended for small systems and tests.
#[derive(Debug, Clone, Copy, Default)]
pub struct DenseLuFactorizer;

impl Factorizer for DenseLuFactorizer {
    type Factor = DenseLu;

    fn factorize(&self, a: &Csr<C64>) -> Result<DenseLu> {
        let mut d = DMat::zeros(a.nrows, a.ncols);
        a.for_each(|i, j, v| d[(i, j)] = v);
        DenseLu::factor(&d)
    }
}

/// A generalized pencil `Ã u = μ B u`.
pub trait Pencil {
    fn dim(&self) -> usize;
    fn apply_a(&self, x: &[C64], y: &mut [C64]);
    fn apply_b(&self, x: &[C64], y: &mut [C64]);
    fn a_frobenius(&self) -> f64;
}

/// An eigenpair `μ, u` of a pencil with its relative residual.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub mu: C64,
    pub vector: Vec<C64>,
    pub residual: f64,
    pub converged: bool,
}

/// `‖Ãu − μBu‖ / (‖Ã‖_F ‖u‖)`.
pub fn eig_residual<P: Pencil + ?Sized>(pencil: &P, mu: C64, u: &[C64]) -> f64 {
    let n = pencil.dim();
    let mut au = vec![C64::new(0.0, 0.0); n];
    let mut bu = vec![C64::new(0.0, 0.0); n];
    pencil.apply_a(u, &mut au);
    pencil.apply_b(u, &mut bu);
    let r = au.iter().zip(&bu).map(|(a, b)| (a - mu * b).norm_sqr()).sum::<f64>().sqrt();
    let un = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    r / (pencil.a_frobenius() * un)
}

/// Ritz values with `|ν|` below this fraction of the largest are treated as
/// infinite eigenvalues `μ = 1/ν` and dropped.
pub const NU_FILTER: f64 = 1e-12;

/// Eigenvalues `μ` of `Ã u = μ B u` nearest the origin, from the largest `ν`
/// of `Ã⁻¹ B`. `factor` must hold a factorization of `Ã`. Results are sorted
/// by `|μ|`.
pub fn shift_invert<P: Pencil + ?Sized, F: Factorize + ?Sized>(
    pencil: &P,
    factor: &F,
    opts: &KrylovOptions,
) -> Result<Vec<EigenPair>> {
    let n = pencil.dim();
    if factor.dim() != n {
        return Err(Error::Dimension(alloc::format!("factorization of order {} for pencil of order {n}", factor.dim())));
    }
    let mut op = |x: &[C64], y: &mut [C64]| -> Result<()> {
        pencil.apply_b(x, y);
        factor.solve_in_place(y)
    };
    let res = krylov_schur(n, &mut op, opts)?;
    let numax = res.pairs.iter().map(|p| p.value.norm()).fold(0.0, f64::max);
    let mut out: Vec<EigenPair> = res
        .pairs
        .into_iter()
        .filter(|p| p.value.norm() > NU_FILTER * numax)
        .map(|p| {
            let mu = p.value.inv();
            let residual = eig_residual(pencil, mu, &p.vector);
            EigenPair { mu, vector: p.vector, residual, converged: p.converged }
        })
        .collect();
    out.sort_by(|a, b| a.mu.norm().partial_cmp(&b.mu.norm()).unwrap_or(core::cmp::Ordering::Equal));
    Ok(out)
}

/// Sparse pencil `A u = μ B u` with real `B`.
#[derive(Debug, Clone)]
pub struct SparsePencil {
    pub a: Csr<C64>,
    pub b: Csr<f64>,
    frobenius: f64,
}

impl SparsePencil {
    pub fn new(a: Csr<C64>, b: Csr<f64>) -> Result<Self> {
        if a.nrows != a.ncols || b.nrows != a.nrows || b.ncols != a.ncols {
            return Err(Error::Dimension("pencil blocks of different shapes".into()));
        }
        let frobenius = a.frobenius();
        Ok(SparsePencil { a, b, frobenius })
    }
}

impl Pencil for SparsePencil {
    fn dim(&self) -> usize {
        self.a.nrows
    }
    fn apply_a(&self, x: &[C64], y: &mut [C64]) {
        self.a.matvec(x, y)
    }
    fn apply_b(&self, x: &[C64], y: &mut [C64]) {
        self.b.matvec(x, y)
    }
    fn a_frobenius(&self) -> f64 {
        self.frobenius
    }
}

/// Dense pencil, mainly for tests and small oracles.
#[derive(Debug, Clone)]
pub struct DensePencil {
    pub a: DMat,
    pub b: DMat,
}

impl Pencil for DensePencil {
    fn dim(&self) -> usize {
        self.a.rows
    }
    fn apply_a(&self, x: &[C64], y: &mut [C64]) {
        self.a.matvec(x, y)
    }
    fn apply_b(&self, x: &[C64], y: &mut [C64]) {
        self.b.matvec(x, y)
    }
    fn a_frobenius(&self) -> f64 {
        self.a.frobenius()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> DMat {
        DMat::from_fn(v.len(), v.len(), |i, j| C64::new(if i == j { v[i] } else { 0.0 }, 0.0))
    }

    #[test]
    fn diagonal_pencil() {
        let p = DensePencil { a: diag(&[1.0, 2.0, 3.0, 4.0]), b: DMat::identity(4) };
        let lu = DenseLu::factor(&p.a).unwrap();
        let pairs = shift_invert(&p, &lu, &KrylovOptions::new(4)).unwrap();
        let mus: Vec<f64> = pairs.iter().map(|e| e.mu.re).collect();
        for (m, e) in mus.iter().zip([1.0, 2.0, 3.0, 4.0]) {
            assert!((m - e).abs() < 1e-12);
        }
        assert!(pairs.iter().all(|e| e.residual < 1e-14 && e.converged));
    }

    #[test]
    fn residual_grows_linearly_with_perturbation() {
        let p = DensePencil { a: diag(&[1.0, 2.0, 3.0]), b: DMat::identity(3) };
        let u = [C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert_eq!(eig_residual(&p, C64::new(1.0, 0.0), &u), 0.0);
        let r = |eps: f64| eig_residual(&p, C64::new(1.0, 0.0), &[u[0], C64::new(eps, 0.0), C64::new(0.0, 0.0)]);
        let slope = r(2e-6) / r(1e-6);
        assert!((slope - 2.0).abs() < 1e-6);
    }

    #[test]
    fn determinism() {
        let a = DMat::from_fn(40, 40, |i, j| C64::new(((i * 7 + j * 3) % 11) as f64 - 5.0 + if i == j { 20.0 } else { 0.0 }, (i as f64 - j as f64) * 0.01));
        let p = DensePencil { a: a.clone(), b: DMat::identity(40) };
        let lu = DenseLu::factor(&a).unwrap();
        let mut o = KrylovOptions::new(4);
        o.ncv = Some(12);
        let x = shift_invert(&p, &lu, &o).unwrap();
        let y = shift_invert(&p, &lu, &o).unwrap();
        assert_eq!(x, y);
    }
}
