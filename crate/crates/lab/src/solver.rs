//! Sparse LU backend for the coupled pencils.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::MatMut;
use trapmode_core::linalg::{Factorize, Factorizer};
use trapmode_core::sparse::Csr;
use trapmode_core::{Error, Result, C64};

/// Supernodal/simplicial sparse LU with partial pivoting (faer).
#[derive(Debug, Clone, Copy, Default)]
pub struct SparseLuFactorizer;

pub struct SparseLu {
    lu: Lu<usize, C64>,
    n: usize,
}

impl Factorizer for SparseLuFactorizer {
    type Factor = SparseLu;

    fn factorize(&self, a: &Csr<C64>) -> Result<SparseLu> {
        if a.nrows != a.ncols {
            return Err(Error::Dimension(format!("LU of a {}×{} matrix", a.nrows, a.ncols)));
        }
        let mut trip = Vec::with_capacity(a.nnz());
        a.for_each(|i, j, v| trip.push(Triplet::new(i, j, v)));
        let m = SparseColMat::<usize, C64>::try_new_from_triplets(a.nrows, a.ncols, &trip)
            .map_err(|e| Error::InvalidArgument(format!("sparse matrix construction: {e:?}")))?;
        let lu = m.sp_lu().map_err(|e| Error::Singular { k: None, detail: format!("sparse LU failed: {e:?}") })?;
        Ok(SparseLu { lu, n: a.nrows })
    }
}

impl Factorize for SparseLu {
    fn dim(&self) -> usize {
        self.n
    }

    fn solve_in_place(&self, rhs: &mut [C64]) -> Result<()> {
        if rhs.len() != self.n {
            return Err(Error::Dimension(format!("right-hand side of length {} for order {}", rhs.len(), self.n)));
        }
        let n = self.n;
        self.lu.solve_in_place(MatMut::from_column_major_slice_mut(rhs, n, 1));
        if rhs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Singular { k: None, detail: "non-finite solution from sparse LU".into() });
        }
        Ok(())
    }
}
