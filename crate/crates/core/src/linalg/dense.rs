//! Row-major dense complex matrices and partially pivoted LU.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct DMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl DMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        DMat { rows, cols, data }
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.rows) {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    pub fn matmul(&self, other: &DMat) -> DMat {
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> DMat {
        DMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm1(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for DMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `PA = LU` with unit lower `L`, stored in place.
#[derive(Debug, Clone)]
pub struct DenseLu {
    lu: DMat,
    perm: Vec<usize>,
    swaps: usize,
    norm1: f64,
}

impl DenseLu {
    /// Fails with [`Error::Singular`] when a pivot falls below `n·ε·max|a_ij|`.
    pub fn factor(a: &DMat) -> Result<Self> {
        if a.rows != a.cols {
            return Err(Error::Dimension(alloc::format!("LU of a {}×{} matrix", a.rows, a.cols)));
        }
        if a.data.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let scale = a.data.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let tiny = (n.max(1) as f64) * f64::EPSILON * scale;
        for k in 0..n {
            let (p, big) = (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if !(big > tiny) {
                return Err(Error::Singular { k: None, detail: alloc::format!("pivot {big:.3e} in column {k} of {n}") });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let piv = lu[(k, k)].inv();
            for i in k + 1..n {
                let f = lu[(i, k)] * piv;
                lu[(i, k)] = f;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu.data[k * n + j];
                    lu.data[i * n + j] -= f * u;
                }
            }
        }
        Ok(DenseLu { lu, perm, swaps, norm1: a.norm1() })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: C64 = (0..i).map(|j| row[j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: C64 = (i + 1..n).map(|j| row[j] * x[j]).sum();
            x[i] = (x[i] - s) / row[i];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `Aᴴ x = b`.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        let mut w = b.to_vec();
        for i in 0..n {
            let s: C64 = (0..i).map(|j| self.lu[(j, i)].conj() * w[j]).sum();
            w[i] = (w[i] - s) / self.lu[(i, i)].conj();
        }
        for i in (0..n).rev() {
            let s: C64 = (i + 1..n).map(|j| self.lu[(j, i)].conj() * w[j]).sum();
            w[i] -= s;
        }
        for (i, &p) in self.perm.iter().enumerate() {
            b[p] = w[i];
        }
    }

    pub fn determinant(&self) -> C64 {
        let d: C64 = (0..self.dim()).map(|i| self.lu[(i, i)]).product();
        if self.swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    /// Reciprocal 1-norm condition number, `‖A⁻¹‖₁` from Hager's estimator.
    pub fn rcond(&self) -> f64 {
        let n = self.dim();
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![C64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        for _ in 0..5 {
            let mut y = x.clone();
            self.solve_in_place(&mut y);
            est = y.iter().map(|v| v.norm()).sum::<f64>();
            let mut z: Vec<C64> = y.iter().map(|v| if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) }).collect();
            self.solve_adjoint_in_place(&mut z);
            let (jmax, zmax) = z.iter().enumerate().map(|(i, v)| (i, v.norm())).fold((0, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx {
                break;
            }
            x = vec![C64::new(0.0, 0.0); n];
            x[jmax] = C64::new(1.0, 0.0);
        }
        if est == 0.0 || self.norm1 == 0.0 {
            0.0
        } else {
            1.0 / (est * self.norm1)
        }
    }
}
