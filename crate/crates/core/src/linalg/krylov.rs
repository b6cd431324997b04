//! Krylov–Schur (thick-restart Arnoldi) for the largest-modulus eigenvalues
//! of a linear operator, used in shift-invert mode `v ↦ Ã⁻¹ B v`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::schur::schur;
use super::DMat;
use crate::{Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Seed of the fixed pseudo-random start vector.
pub const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovOptions {
    pub nev: usize,
    /// Subspace dimension; `None` picks `max(2·nev + 20, 4·nev)`.
    pub ncv: Option<usize>,
    /// Relative Ritz residual `‖Op y − ν y‖ ≤ tol·|ν|`.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

impl KrylovOptions {
    pub fn new(nev: usize) -> Self {
        KrylovOptions { nev, ncv: None, tol: 1e-11, max_restarts: 300, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RitzPair {
    pub value: C64,
    /// Unit 2-norm Ritz vector.
    pub vector: Vec<C64>,
    /// Ritz residual estimate `‖Op y − ν y‖`.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrylovResult {
    /// Ordered by decreasing `|ν|`.
    pub pairs: Vec<RitzPair>,
    pub restarts: usize,
    pub operator_applications: usize,
}

impl KrylovResult {
    pub fn converged(&self) -> usize {
        self.pairs.iter().filter(|p| p.converged).count()
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Classical Gram–Schmidt would lose orthogonality here; two MGS sweeps
/// ("twice is enough") keep it at machine level.
fn orthogonalize(basis: &[Vec<C64>], w: &mut [C64], h: &mut [C64]) {
    h.iter_mut().for_each(|v| *v = ZERO);
    for _ in 0..2 {
        for (j, v) in basis.iter().enumerate() {
            let c = dot(v, w);
            h[j] += c;
            w.iter_mut().zip(v).for_each(|(wi, vi)| *wi -= c * vi);
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0;
    (0..n).map(|_| C64::new(u(), u())).collect()
}

/// Largest-`|ν|` eigenpairs of `op`. Non-convergence within the restart budget
/// is reported through the per-pair flags, not as an error.
pub fn krylov_schur(
    n: usize,
    op: &mut dyn FnMut(&[C64], &mut [C64]) -> Result<()>,
    opts: &KrylovOptions,
) -> Result<KrylovResult> {
    if opts.nev == 0 || n == 0 {
        return Err(crate::Error::InvalidArgument("eigensolver needs nev ≥ 1 and a nonempty operator".into()));
    }
    let nev = opts.nev.min(n);
    let m = opts.ncv.unwrap_or((2 * nev + 20).max(4 * nev)).clamp(nev + 1, n.max(nev + 1)).min(n);
    let keep = (2 * nev).min(m.saturating_sub(1)).max(nev.min(m));
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut applications = 0usize;

    // one application pushes the start vector into the range of the operator,
    // away from directions with ν = 0
    let mut v0 = random_vector(&mut rng, n);
    let mut w = vec![ZERO; n];
    op(&v0, &mut w)?;
    applications += 1;
    let nw = norm(&w);
    if nw > 0.0 {
        v0 = w.iter().map(|x| x / nw).collect();
    } else {
        let n0 = norm(&v0);
        v0.iter_mut().for_each(|x| *x /= n0);
    }

    let mut basis: Vec<Vec<C64>> = vec![v0];
    let mut h = DMat::zeros(m + 1, m);
    let mut start = 0usize;
    let mut restarts = 0usize;
    let mut hcol = vec![ZERO; m + 1];
    let mut op_norm: f64 = 0.0;
    loop {
        for j in start..m {
            op(&basis[j], &mut w)?;
            applications += 1;
            op_norm = op_norm.max(norm(&w));
            orthogonalize(&basis[..=j], &mut w, &mut hcol[..=j]);
            let beta = norm(&w);
            for i in 0..=j {
                h[(i, j)] = hcol[i];
            }
            if beta <= 1e-13 * op_norm {
                // invariant subspace found: continue from a fresh direction
                h[(j + 1, j)] = ZERO;
                let mut r = random_vector(&mut rng, n);
                let mut scratch = vec![ZERO; j + 1];
                orthogonalize(&basis[..=j], &mut r, &mut scratch);
                let rn = norm(&r);
                r.iter_mut().for_each(|x| *x /= rn);
                basis.push(r);
            } else {
                h[(j + 1, j)] = C64::new(beta, 0.0);
                basis.push(w.iter().map(|x| x / beta).collect());
            }
        }
        let hm = DMat::from_fn(m, m, |i, j| h[(i, j)]);
        let mut sch = schur(&hm)?;
        sch.sort_by_key(|z| z.norm());
        // residual coupling row b·Q
        let bq: Vec<C64> = (0..m).map(|j| (0..m).map(|l| h[(m, l)] * sch.q[(l, j)]).sum()).collect();
        let ritz = sch.eigenvalues();
        let scale = ritz.first().map_or(0.0, |z| z.norm()).max(f64::MIN_POSITIVE);
        let mut pairs = Vec::with_capacity(nev);
        for (i, &value) in ritz.iter().enumerate().take(nev) {
            let y = sch.triangular_eigenvector(i);
            let res = y.iter().zip(&bq).map(|(a, b)| a * b).sum::<C64>().norm();
            let converged = res <= opts.tol * value.norm().max(1e-3 * scale);
            pairs.push((value, y, res, converged));
        }
        let done = pairs.iter().all(|p| p.3) || m == n;
        if done || restarts >= opts.max_restarts {
            let out = pairs
                .into_iter()
                .map(|(value, y, residual, converged)| {
                    let qy: Vec<C64> = (0..m).map(|l| (0..m).map(|j| sch.q[(l, j)] * y[j]).sum()).collect();
                    let mut x = vec![ZERO; n];
                    for (l, c) in qy.iter().enumerate() {
                        x.iter_mut().zip(&basis[l]).for_each(|(xi, vi)| *xi += c * vi);
                    }
                    let xn = norm(&x);
                    x.iter_mut().for_each(|v| *v /= xn);
                    RitzPair { value, vector: x, residual, converged: converged || m == n }
                })
                .collect();
            return Ok(KrylovResult { pairs: out, restarts, operator_applications: applications });
        }
        restarts += 1;
        // thick restart: V ← V Q[:, :keep], H ← [T_keep; b Q_keep]
        let mut new_basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        for i in 0..keep {
            let mut x = vec![ZERO; n];
            for l in 0..m {
                let c = sch.q[(l, i)];
                x.iter_mut().zip(&basis[l]).for_each(|(xi, vi)| *xi += c * vi);
            }
            new_basis.push(x);
        }
        new_basis.push(basis.swap_remove(m));
        basis = new_basis;
        h = DMat::zeros(m + 1, m);
        for i in 0..keep {
            for j in i..keep {
                h[(i, j)] = sch.t[(i, j)];
            }
            h[(keep, i)] = bq[i];
        }
        start = keep;
    }
}
