//! Compressed sparse row matrices with sorted, duplicate-free columns.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul};

#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct Csr<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T> Csr<T>
where
    T: Copy + Zero + Add<Output = T> + Mul<Output = T>,
{
    /// Sums duplicate entries; columns within a row come out ascending.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            if i >= nrows || j >= ncols {
                return Err(Error::Dimension(alloc::format!("entry ({i}, {j}) outside {nrows}×{ncols}")));
            }
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::zero(); triplets.len()];
        for &(i, j, v) in triplets {
            cols[fill[i]] = j;
            vals[fill[i]] = v;
            fill[i] += 1;
        }
        let mut indptr = Vec::with_capacity(nrows + 1);
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        indptr.push(0);
        let mut row: Vec<(usize, T)> = Vec::new();
        for i in 0..nrows {
            row.clear();
            row.extend((counts[i]..counts[i + 1]).map(|p| (cols[p], vals[p])));
            row.sort_by_key(|e| e.0);
            let mut p = 0;
            while p < row.len() {
                let (j, mut v) = row[p];
                p += 1;
                while p < row.len() && row[p].0 == j {
                    v = v + row[p].1;
                    p += 1;
                }
                indices.push(j);
                values.push(v);
            }
            indptr.push(indices.len());
        }
        Ok(Csr { nrows, ncols, indptr, indices, values })
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let row = &self.indices[self.indptr[i]..self.indptr[i + 1]];
        match row.binary_search(&j) {
            Ok(p) => self.values[self.indptr[i] + p],
            Err(_) => T::zero(),
        }
    }

    /// `y = A x` for any scalar type the entries can multiply into.
    pub fn matvec<U>(&self, x: &[U], y: &mut [U])
    where
        U: Copy + Zero + Add<Output = U> + Mul<T, Output = U>,
    {
        for i in 0..self.nrows {
            let mut acc = U::zero();
            for p in self.indptr[i]..self.indptr[i + 1] {
                acc = acc + x[self.indices[p]] * self.values[p];
            }
            y[i] = acc;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut trip = Vec::with_capacity(self.nnz());
        self.for_each(|i, j, v| trip.push((j, i, v)));
        Csr::from_triplets(self.ncols, self.nrows, &trip).expect("transpose keeps indices in range")
    }

    pub fn for_each(&self, mut f: impl FnMut(usize, usize, T)) {
        for i in 0..self.nrows {
            for p in self.indptr[i]..self.indptr[i + 1] {
                f(i, self.indices[p], self.values[p]);
            }
        }
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Csr<U> {
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr: self.indptr.clone(),
            indices: self.indices.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl Csr<f64> {
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        self.for_each(|i, j, v| worst = worst.max((v - self.get(j, i)).abs()));
        worst
    }

    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

impl Csr<C64> {
    pub fn frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// `a·X + b·Y` for matrices of equal shape.
pub fn linear_combination(a: f64, x: &Csr<f64>, b: f64, y: &Csr<f64>) -> Result<Csr<f64>> {
    if x.nrows != y.nrows || x.ncols != y.ncols {
        return Err(Error::Dimension("linear combination of differently shaped matrices".into()));
    }
    let mut trip = Vec::with_capacity(x.nnz() + y.nnz());
    x.for_each(|i, j, v| trip.push((i, j, a * v)));
    y.for_each(|i, j, v| trip.push((i, j, b * v)));
    Csr::from_triplets(x.nrows, x.ncols, &trip)
}
