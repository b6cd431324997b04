//! Complex Schur decomposition of small dense matrices: Householder reduction
//! to Hessenberg form, then implicit single-shift QR with Wilkinson shifts.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::DMat;
use crate::{Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `A = Q T Qᴴ` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: DMat,
    pub q: DMat,
}

/// Rotation `[[c, s], [−s̄, c]]` mapping `(f, g)` to `(r, 0)`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    if g == ZERO {
        return (1.0, ZERO);
    }
    if f == ZERO {
        return (0.0, g.conj() / g.norm());
    }
    let fa = f.norm();
    let rho = fa.hypot(g.norm());
    (fa / rho, (f / fa) * g.conj() / rho)
}

fn rotate_rows(m: &mut DMat, k: usize, c: f64, s: C64, cols: core::ops::Range<usize>) {
    for j in cols {
        let a = m[(k, j)];
        let b = m[(k + 1, j)];
        m[(k, j)] = a * c + s * b;
        m[(k + 1, j)] = b * c - s.conj() * a;
    }
}

fn rotate_cols(m: &mut DMat, k: usize, c: f64, s: C64, rows: core::ops::Range<usize>) {
    for i in rows {
        let a = m[(i, k)];
        let b = m[(i, k + 1)];
        m[(i, k)] = a * c + s.conj() * b;
        m[(i, k + 1)] = b * c - s * a;
    }
}

fn hessenberg(a: &mut DMat, q: &mut DMat) {
    let n = a.rows;
    for k in 0..n.saturating_sub(2) {
        let alpha: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let mut v: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * alpha;
        let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vn == 0.0 {
            continue;
        }
        // H = I − 2 v vᴴ / (vᴴv), applied on both sides
        for j in 0..n {
            let d: C64 = v.iter().enumerate().map(|(l, vl)| vl.conj() * a[(k + 1 + l, j)]).sum::<C64>() * (2.0 / vn);
            for (l, vl) in v.iter().enumerate() {
                a[(k + 1 + l, j)] -= vl * d;
            }
        }
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let d: C64 = v.iter().enumerate().map(|(l, vl)| m[(i, k + 1 + l)] * vl).sum::<C64>() * (2.0 / vn);
                for (l, vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= d * vl.conj();
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powu(2) + b * c;
    let r = disc.sqrt();
    let (l1, l2) = (tr_half + r, tr_half - r);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn schur(a: &DMat) -> Result<Schur> {
    if a.rows != a.cols {
        return Err(Error::Dimension("Schur form of a non-square matrix".into()));
    }
    let n = a.rows;
    let mut t = a.clone();
    let mut q = DMat::identity(n);
    hessenberg(&mut t, &mut q);
    let scale = t.frobenius().max(f64::MIN_POSITIVE);
    let mut hi = n;
    let mut iter = 0usize;
    let mut since_deflation = 0usize;
    while hi > 1 {
        let h = hi - 1;
        // find the start of the unreduced block ending at h
        let mut lo = h;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let diag = t[(lo, lo)].norm() + t[(lo - 1, lo - 1)].norm();
            if sub <= f64::EPSILON * if diag > 0.0 { diag } else { scale } {
                t[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == h {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > 100 * n.max(1) {
            return Err(Error::SeriesNonConvergence(alloc::format!("QR iteration stalled at order {n}")));
        }
        let shift = if since_deflation % 11 == 10 {
            t[(h, h)] + C64::new(0.75 * t[(h, h - 1)].norm(), 0.0)
        } else {
            wilkinson(t[(h - 1, h - 1)], t[(h - 1, h)], t[(h, h - 1)], t[(h, h)])
        };
        for k in lo..h {
            let (f, g) = if k == lo { (t[(lo, lo)] - shift, t[(lo + 1, lo)]) } else { (t[(k, k - 1)], t[(k + 1, k - 1)]) };
            let (c, s) = givens(f, g);
            let c0 = if k == lo { lo } else { k - 1 };
            rotate_rows(&mut t, k, c, s, c0..n);
            rotate_cols(&mut t, k, c, s, 0..(k + 3).min(h + 1));
            rotate_cols(&mut q, k, c, s, 0..n);
            if k > lo {
                t[(k + 1, k - 1)] = ZERO;
            }
        }
    }
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t, q })
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.t.rows).map(|i| self.t[(i, i)]).collect()
    }

    /// Swaps diagonal entries `k` and `k+1` by a unitary rotation.
    fn swap(&mut self, k: usize) {
        let n = self.t.rows;
        let t11 = self.t[(k, k)];
        let t22 = self.t[(k + 1, k + 1)];
        let (c, s) = givens(self.t[(k, k + 1)], t22 - t11);
        if k + 2 < n {
            rotate_rows(&mut self.t, k, c, s, k + 2..n);
        }
        rotate_cols(&mut self.t, k, c, s, 0..k);
        self.t[(k, k)] = t22;
        self.t[(k + 1, k + 1)] = t11;
        rotate_cols(&mut self.q, k, c, s, 0..n);
    }

    /// Reorders so diagonal entries appear by decreasing `key`.
    pub fn sort_by_key(&mut self, key: impl Fn(C64) -> f64) {
        let n = self.t.rows;
        for target in 0..n {
            let best = (target..n)
                .max_by(|&a, &b| key(self.t[(a, a)]).partial_cmp(&key(self.t[(b, b)])).unwrap_or(core::cmp::Ordering::Equal))
                .unwrap_or(target);
            let mut pos = best;
            // strict comparison keeps the original order among ties
            if key(self.t[(best, best)]) <= key(self.t[(target, target)]) {
                continue;
            }
            while pos > target {
                self.swap(pos - 1);
                pos -= 1;
            }
        }
    }

    /// Unit eigenvector of the triangular factor for diagonal entry `j`
    /// (components beyond `j` vanish).
    pub fn triangular_eigenvector(&self, j: usize) -> Vec<C64> {
        let t = &self.t;
        let lam = t[(j, j)];
        let small = f64::EPSILON * t.frobenius().max(f64::MIN_POSITIVE);
        let mut y = alloc::vec![ZERO; t.rows];
        y[j] = C64::new(1.0, 0.0);
        for i in (0..j).rev() {
            let s: C64 = (i + 1..=j).map(|l| t[(i, l)] * y[l]).sum();
            let mut d = t[(i, i)] - lam;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[i] = -s / d;
        }
        let nrm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= nrm);
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};

    fn random(n: usize, seed: u64) -> DMat {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
        DMat::from_fn(n, n, |_, _| C64::new(u(), u()))
    }

    fn check(a: &DMat, s: &Schur) {
        let rec = s.q.matmul(&s.t).matmul(&s.q.adjoint());
        let err = DMat::from_fn(a.rows, a.cols, |i, j| rec[(i, j)] - a[(i, j)]).frobenius();
        assert!(err < 1e-12 * a.frobenius().max(1.0), "reconstruction {err}");
        let orth = s.q.adjoint().matmul(&s.q);
        let err = DMat::from_fn(a.rows, a.cols, |i, j| orth[(i, j)] - if i == j { C64::new(1.0, 0.0) } else { ZERO }).frobenius();
        assert!(err < 1e-12);
    }

    #[test]
    fn random_matrices_decompose() {
        for seed in 0..20 {
            let a = random(3 + seed as usize * 2, seed);
            let s = schur(&a).unwrap();
            check(&a, &s);
        }
    }

    #[test]
    fn matches_nalgebra_eigenvalues() {
        let a = random(25, 99);
        let mut ours = schur(&a).unwrap().eigenvalues();
        let na = nalgebra::DMatrix::from_fn(25, 25, |i, j| a[(i, j)]);
        let mut theirs: Vec<C64> = na.schur().eigenvalues().unwrap().iter().copied().collect();
        let key = |z: &C64| (z.re * 1e6).round() * 1e7 + z.im;
        ours.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        theirs.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (x, y) in ours.iter().zip(&theirs) {
            assert!((x - y).norm() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn reordering_keeps_factorization() {
        let a = random(12, 5);
        let mut s = schur(&a).unwrap();
        s.sort_by_key(|z| z.norm());
        check(&a, &s);
        let ev = s.eigenvalues();
        assert!(ev.windows(2).all(|w| w[0].norm() >= w[1].norm() - 1e-12));
        for j in 0..12 {
            let y = s.triangular_eigenvector(j);
            let mut ty = alloc::vec![ZERO; 12];
            s.t.matvec(&y, &mut ty);
            assert!(ty.iter().zip(&y).all(|(u, v)| (u - ev[j] * v).norm() < 1e-10));
        }
    }

    #[test]
    fn triangular_input_is_fixed_point() {
        let a = DMat::from_fn(4, 4, |i, j| if j >= i { C64::new((i + j) as f64 + 1.0, 0.0) } else { ZERO });
        let s = schur(&a).unwrap();
        check(&a, &s);
        let mut ev: Vec<f64> = s.eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(ev, [1.0, 3.0, 5.0, 7.0]);
    }
}
