//! Angular and radial (modified, first kind) Mathieu functions.
//!
//! For each of the four symmetry classes the Fourier coefficients solve a
//! symmetric tridiagonal eigenproblem. The eigenvalue of index `r` is found by
//! Sturm-sequence bisection, its vector by inverse iteration. Jacobi matrices
//! with nonzero off-diagonal have simple spectra, so for `q > 0` the branch is
//! identified by index alone and no continuation in `q` is needed.
//!
//! Normalization: the symmetrized coefficient vector has unit Euclidean norm
//! and its first entry is positive. For `ce_{2r}` the true `A_0` is the first
//! symmetrized entry divided by √2. With this choice every angular function
//! satisfies `∫_0^{2π} f(η)² dη = π`.
//!
//! Radial functions use the Bessel-product expansions in
//! `u1 = √q e^{-ξ}`, `u2 = √q e^{ξ}`, which converge for all `ξ ≥ 0`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;

#[allow(unused_imports)]
use num_traits::Float;

use super::bessel::bessel_j_sequence;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn as_char(self) -> char {
        match self {
            Parity::Even => 'e',
            Parity::Odd => 'o',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'e' | 'E' => Some(Parity::Even),
            'o' | 'O' => Some(Parity::Odd),
            _ => None,
        }
    }
}

/// Characteristic value `a_n(q)` (even) or `b_n(q)` (odd).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuChar {
    pub n: u32,
    pub parity: Parity,
    pub q: f64,
    pub a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    /// ce_{2r}: cos(2kη)
    CeEven,
    /// ce_{2r+1}: cos((2k+1)η)
    CeOdd,
    /// se_{2r+1}: sin((2k+1)η)
    SeOdd,
    /// se_{2r+2}: sin((2k+2)η)
    SeEven,
}

impl Class {
    fn of(n: u32, parity: Parity) -> Result<(Class, usize)> {
        let n = n as usize;
        Ok(match (parity, n % 2) {
            (Parity::Even, 0) => (Class::CeEven, n / 2),
            (Parity::Even, _) => (Class::CeOdd, (n - 1) / 2),
            (Parity::Odd, 1) => (Class::SeOdd, (n - 1) / 2),
            (Parity::Odd, _) => {
                if n == 0 {
                    return Err(Error::InvalidArgument("odd Mathieu functions start at n = 1".into()));
                }
                (Class::SeEven, (n - 2) / 2)
            }
        })
    }

    /// Harmonic of Fourier term `k`.
    fn harmonic(self, k: usize) -> f64 {
        (match self {
            Class::CeEven => 2 * k,
            Class::CeOdd | Class::SeOdd => 2 * k + 1,
            Class::SeEven => 2 * k + 2,
        }) as f64
    }

    fn matrix(self, q: f64, size: usize) -> (Vec<f64>, Vec<f64>) {
        let diag: Vec<f64> = (0..size)
            .map(|k| {
                let h = self.harmonic(k);
                h * h
            })
            .collect();
        let mut off = vec![q; size.saturating_sub(1)];
        let mut diag = diag;
        match self {
            Class::CeEven => {
                if size > 1 {
                    off[0] = SQRT_2 * q;
                }
            }
            Class::CeOdd => diag[0] += q,
            Class::SeOdd => diag[0] -= q,
            Class::SeEven => {}
        }
        (diag, off)
    }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (diag[i].abs() + x.abs() + 1.0);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalue of index `r` (ascending) by bisection to full precision.
fn tridiag_eigenvalue(diag: &[f64], off: &[f64], r: usize) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let mut rad = 0.0;
        if i > 0 {
            rad += off[i - 1].abs();
        }
        if i < off.len() {
            rad += off[i].abs();
        }
        lo = lo.min(diag[i] - rad);
        hi = hi.max(diag[i] + rad);
    }
    lo -= 1.0;
    hi += 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > r {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T - s I) x = b` for tridiagonal `T` with partial pivoting.
fn tridiag_solve(diag: &[f64], off: &[f64], s: f64, b: &mut [f64]) {
    let n = diag.len();
    // rows stored as (main, super1, super2) after elimination
    let mut d: Vec<f64> = diag.iter().map(|&v| v - s).collect();
    let mut u1: Vec<f64> = (0..n).map(|i| if i + 1 < n { off[i] } else { 0.0 }).collect();
    let mut u2 = vec![0.0; n];
    let mut l: Vec<f64> = (0..n).map(|i| if i >= 1 { off[i - 1] } else { 0.0 }).collect();
    let tiny = f64::EPSILON * diag.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    for i in 0..n.saturating_sub(1) {
        // candidate pivot rows: i (d[i], u1[i], u2[i]) and i+1 (l[i+1], d[i+1], u1[i+1])
        if l[i + 1].abs() > d[i].abs() {
            let (a0, a1, a2) = (d[i], u1[i], u2[i]);
            d[i] = l[i + 1];
            u1[i] = d[i + 1];
            u2[i] = u1[i + 1];
            l[i + 1] = a0;
            d[i + 1] = a1;
            u1[i + 1] = a2;
            b.swap(i, i + 1);
        }
        if d[i] == 0.0 {
            d[i] = tiny;
        }
        let m = l[i + 1] / d[i];
        d[i + 1] -= m * u1[i];
        u1[i + 1] -= m * u2[i];
        b[i + 1] -= m * b[i];
    }
    if n > 0 && d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        if i + 1 < n {
            v -= u1[i] * b[i + 1];
        }
        if i + 2 < n {
            v -= u2[i] * b[i + 2];
        }
        b[i] = v / d[i];
    }
}

fn tridiag_eigenvector(diag: &[f64], off: &[f64], lambda: f64) -> Vec<f64> {
    let n = diag.len();
    let scale = diag.iter().fold(1.0, |m: f64, v| m.max(v.abs()));
    let shift = lambda + 1e3 * f64::EPSILON * scale;
    let mut x = vec![1.0; n];
    for _ in 0..3 {
        tridiag_solve(diag, off, shift, &mut x);
        let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= nrm);
    }
    x
}

/// Fourier coefficients of an angular Mathieu function together with its
/// characteristic value.
#[derive(Debug, Clone, PartialEq)]
pub struct MathieuCoefficients {
    pub n: u32,
    pub parity: Parity,
    pub q: f64,
    pub a: f64,
    class: Class,
    /// True series coefficients (`A_0` already divided by √2 for `ce_{2r}`).
    pub coeffs: Vec<f64>,
}

const MAX_TRUNCATION: usize = 4096;

fn solve(n: u32, parity: Parity, q: f64) -> Result<(Class, f64, Vec<f64>)> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("Mathieu parameter q = {q} must be finite and ≥ 0")));
    }
    let (class, r) = Class::of(n, parity)?;
    if q == 0.0 {
        // pure Fourier harmonic, a = n² exactly
        let mut v = vec![0.0; r + 1];
        v[r] = if class == Class::CeEven && r == 0 { 1.0 / SQRT_2 } else { 1.0 };
        let h = class.harmonic(r);
        return Ok((class, h * h, v));
    }
    let mut size = (r + 12 + (2.0 * q.sqrt()) as usize).max(24);
    let mut prev = f64::NAN;
    loop {
        let (diag, off) = class.matrix(q, size);
        let a = tridiag_eigenvalue(&diag, &off, r);
        if (a - prev).abs() < 1e-12 * a.abs().max(1.0) {
            let mut v = tridiag_eigenvector(&diag, &off, a);
            if v[0] < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            if class == Class::CeEven {
                v[0] /= SQRT_2;
            }
            // drop the negligible tail
            while v.len() > r + 2 && v[v.len() - 1].abs() < 1e-18 {
                v.pop();
            }
            return Ok((class, a, v));
        }
        if size >= MAX_TRUNCATION {
            return Err(Error::BranchTracking {
                n,
                q,
                reason: alloc::format!("characteristic value unstable at truncation {size}"),
            });
        }
        prev = a;
        size *= 2;
    }
}

/// Characteristic value for order `n`, parity and `q ≥ 0`.
pub fn mathieu_char(n: u32, parity: Parity, q: f64) -> Result<MathieuChar> {
    let (_, a, _) = solve(n, parity, q)?;
    Ok(MathieuChar { n, parity, q, a })
}

pub fn mathieu_coefficients(n: u32, parity: Parity, q: f64) -> Result<MathieuCoefficients> {
    let (class, a, coeffs) = solve(n, parity, q)?;
    Ok(MathieuCoefficients { n, parity, q, a, class, coeffs })
}

impl MathieuCoefficients {
    /// Angular function and its η-derivative.
    pub fn angular(&self, eta: f64) -> (f64, f64) {
        let even = matches!(self.class, Class::CeEven | Class::CeOdd);
        let mut v = 0.0;
        let mut dv = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let h = self.class.harmonic(k);
            let (s, co) = (h * eta).sin_cos();
            if even {
                v += c * co;
                dv -= c * h * s;
            } else {
                v += c * s;
                dv += c * h * co;
            }
        }
        (v, dv)
    }

    /// Radial function of the first kind and its ξ-derivative.
    pub fn radial(&self, xi: f64) -> Result<(f64, f64)> {
        if !(xi >= 0.0) {
            return Err(Error::InvalidArgument(alloc::format!("radial coordinate ξ = {xi} must be ≥ 0")));
        }
        if self.q == 0.0 {
            return Err(Error::NonPositiveArgument { x: self.q });
        }
        let sq = self.q.sqrt();
        let u1 = sq * (-xi).exp();
        let u2 = sq * xi.exp();
        let nk = self.coeffs.len() + 3;
        let mut j1 = Vec::new();
        let mut j2 = Vec::new();
        bessel_j_sequence(nk, u1, &mut j1);
        bessel_j_sequence(nk, u2, &mut j2);
        // ξ-derivatives: d/dξ J_m(u1) = -u1 J_m'(u1), d/dξ J_m(u2) = u2 J_m'(u2)
        let dj = |js: &[f64], m: usize, u: f64| -> f64 {
            let prev = if m == 0 { -js[1] } else { js[m - 1] };
            0.5 * (prev - js[m + 1]) * u
        };
        let prod = |a: usize, b: usize| -> (f64, f64) {
            let v = j1[a] * j2[b];
            let d = -dj(&j1, a, u1) * j2[b] + j1[a] * dj(&j2, b, u2);
            (v, d)
        };
        let mut v = 0.0;
        let mut dv = 0.0;
        let mut last = 0.0f64;
        let mut peak = 0.0f64;
        for (k, &c) in self.coeffs.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let (t, dt) = match self.class {
                Class::CeEven => prod(k, k),
                Class::CeOdd => {
                    let (p, dp) = prod(k, k + 1);
                    let (r, dr) = prod(k + 1, k);
                    (p + r, dp + dr)
                }
                Class::SeOdd => {
                    let (p, dp) = prod(k, k + 1);
                    let (r, dr) = prod(k + 1, k);
                    (p - r, dp - dr)
                }
                Class::SeEven => {
                    let (p, dp) = prod(k, k + 2);
                    let (r, dr) = prod(k + 2, k);
                    (p - r, dp - dr)
                }
            };
            let term = sign * c * t;
            v += term;
            dv += sign * c * dt;
            last = term.abs();
            peak = peak.max(term.abs());
        }
        if peak > 0.0 && last > 1e-12 * peak.max(v.abs()) {
            return Err(Error::SeriesNonConvergence(alloc::format!(
                "radial Mathieu series (n = {}, q = {}) tail {last:.2e}",
                self.n, self.q
            )));
        }
        Ok((v, dv))
    }
}

/// Angular Mathieu function `ce_n(η; q)` or `se_n(η; q)` and derivative.
pub fn angular_mathieu(n: u32, parity: Parity, q: f64, eta: f64) -> Result<(f64, f64)> {
    Ok(mathieu_coefficients(n, parity, q)?.angular(eta))
}

/// Radial Mathieu function of the first kind and its ξ-derivative.
pub fn radial_mathieu(n: u32, parity: Parity, q: f64, xi: f64) -> Result<(f64, f64)> {
    if !(q > 0.0) {
        return Err(Error::NonPositiveArgument { x: q });
    }
    mathieu_coefficients(n, parity, q)?.radial(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn q_zero_gives_squares() {
        assert_eq!(mathieu_char(0, Parity::Even, 0.0).unwrap().a, 0.0);
        for n in 1..8 {
            let nn = (n * n) as f64;
            assert!((mathieu_char(n, Parity::Even, 0.0).unwrap().a - nn).abs() < 1e-12);
            assert!((mathieu_char(n, Parity::Odd, 0.0).unwrap().a - nn).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_dense_reference() {
        // dense symmetric eigen-solves on a 120-term truncation
        let cases = [
            (2, Parity::Even, 1.0, 4.371300982735084),
            (1, Parity::Even, 5.0, 1.8581875415477507),
            (3, Parity::Odd, 25.0, -3.5209415266213644),
            (4, Parity::Odd, 40.0, 1.7300456287638388),
            (6, Parity::Even, 100.0, 36.48819446905665),
        ];
        for (n, p, q, a) in cases {
            let got = mathieu_char(n, p, q).unwrap().a;
            assert!((got - a).abs() < 1e-11 * a.abs().max(1.0), "n={n} q={q}: {got} vs {a}");
        }
    }

    #[test]
    fn odd_zero_rejected() {
        assert!(mathieu_char(0, Parity::Odd, 1.0).is_err());
    }

    #[test]
    fn angular_normalization_is_pi() {
        for (n, p) in [(0, Parity::Even), (3, Parity::Even), (2, Parity::Odd), (5, Parity::Odd)] {
            let c = mathieu_coefficients(n, p, 7.5).unwrap();
            let m = 4000;
            let s: f64 = (0..m)
                .map(|i| {
                    let eta = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                    c.angular(eta).0.powi(2)
                })
                .sum::<f64>()
                * 2.0
                * PI
                / m as f64;
            assert!((s - PI).abs() < 1e-10, "n={n}: {s}");
        }
    }

    #[test]
    fn angular_solves_ode() {
        // y'' + (a - 2q cos 2η) y = 0
        let c = mathieu_coefficients(4, Parity::Odd, 12.0).unwrap();
        let h = 1e-4;
        for &eta in &[0.3, 1.1, 2.0] {
            let y = c.angular(eta).0;
            let ypp = (c.angular(eta + h).0 - 2.0 * y + c.angular(eta - h).0) / (h * h);
            let res = ypp + (c.a - 2.0 * c.q * (2.0 * eta).cos()) * y;
            assert!(res.abs() < 1e-5, "residual {res}");
        }
    }

    #[test]
    fn radial_solves_modified_ode() {
        // y'' - (a - 2q cosh 2ξ) y = 0
        for (n, p) in [(0, Parity::Even), (1, Parity::Even), (3, Parity::Odd), (4, Parity::Odd)] {
            let c = mathieu_coefficients(n, p, 20.0).unwrap();
            let h = 1e-4;
            for &xi in &[0.2, 0.55] {
                let (y, _) = c.radial(xi).unwrap();
                let yp = c.radial(xi + h).unwrap().0;
                let ym = c.radial(xi - h).unwrap().0;
                let ypp = (yp - 2.0 * y + ym) / (h * h);
                let res = ypp - (c.a - 2.0 * c.q * (2.0 * xi).cosh()) * y;
                let scale = (c.a.abs() + 2.0 * c.q * 3.0) * c.radial(xi).unwrap().0.abs().max(1e-3);
                assert!(res.abs() < 1e-5 * scale, "n={n}: residual {res}");
            }
        }
    }

    #[test]
    fn radial_derivative_consistent() {
        let c = mathieu_coefficients(2, Parity::Even, 9.0).unwrap();
        let h = 1e-6;
        for &xi in &[0.1, 0.4, 0.8] {
            let (_, d) = c.radial(xi).unwrap();
            let fd = (c.radial(xi + h).unwrap().0 - c.radial(xi - h).unwrap().0) / (2.0 * h);
            assert!((d - fd).abs() < 1e-8 * d.abs().max(1.0));
        }
    }

    #[test]
    fn odd_radial_vanishes_on_focal_line() {
        for n in 1..6 {
            let (v, _) = radial_mathieu(n, Parity::Odd, 4.0, 0.0).unwrap();
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn doubling_truncation_is_stable() {
        let (class, r) = Class::of(3, Parity::Odd).unwrap();
        let (d1, o1) = class.matrix(30.0, 40);
        let (d2, o2) = class.matrix(30.0, 80);
        let a1 = tridiag_eigenvalue(&d1, &o1, r);
        let a2 = tridiag_eigenvalue(&d2, &o2, r);
        assert!((a1 - a2).abs() < 1e-12);
    }
}
