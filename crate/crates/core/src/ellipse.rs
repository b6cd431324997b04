//! Dirichlet eigenmodes of the ellipse `(x/a₁)² + (y/a₂)² < 1`.
//!
//! In elliptic coordinates `x = c cosh ξ cos η`, `y = c sinh ξ sin η` with
//! `c = √(a₁² − a₂²)`, separated solutions are products of angular and radial
//! Mathieu functions with `q = (kc/2)²`. A mode `(m, n, parity)` is the
//! frequency at which the radial factor of order `n` vanishes on the boundary
//! `ξ₀ = atanh(a₂/a₁)` while having exactly `m` zeros inside.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::fem::{assemble_dirichlet, AssembledFem};
use crate::geometry::{BoundaryCurveSet, BoundaryTag};
use crate::linalg::{shift_invert, Factorizer, KrylovOptions, SparsePencil};
use crate::mesh::{generate_mesh_sized, Mesh, MeshDomain, MeshOptions};
use crate::roots::brent;
use crate::specfun::{mathieu_coefficients, MathieuCoefficients, Parity};
use crate::{Error, Point, Result, C64};

/// Cells per axis of the midpoint rule that defines the field normalization.
pub const NORMALIZATION_GRID: usize = 400;

const SCAN_STEP: f64 = 0.02;
const SCAN_K_MAX: f64 = 200.0;
const ZERO_COUNT_SAMPLES: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct EllipseMode {
    pub parity: Parity,
    pub m: u32,
    pub n: u32,
    pub k: f64,
    pub q: f64,
    /// Angular characteristic value.
    pub a: f64,
    pub xi0: f64,
    pub a1: f64,
    pub a2: f64,
    /// Focal half-distance `c`.
    pub focal: f64,
    /// Scale making the discrete `L²(E)` norm one.
    pub norm: f64,
    coeffs: MathieuCoefficients,
}

fn check_axes(a1: f64, a2: f64) -> Result<()> {
    if !(a2 > 0.0) || !(a1 > a2) || !a1.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!("ellipse axes need a1 > a2 > 0, got {a1}, {a2}")));
    }
    Ok(())
}

fn radial_at(n: u32, parity: Parity, q: f64, xi: f64) -> Result<f64> {
    Ok(mathieu_coefficients(n, parity, q)?.radial(xi)?.0)
}

/// Sign changes of the radial factor strictly inside `(0, ξ₀)`.
fn interior_zeros(coeffs: &MathieuCoefficients, xi0: f64) -> Result<u32> {
    let mut count = 0;
    let mut prev = 0.0;
    for i in 1..ZERO_COUNT_SAMPLES {
        let v = coeffs.radial(xi0 * i as f64 / ZERO_COUNT_SAMPLES as f64)?.0;
        if v != 0.0 {
            if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                count += 1;
            }
            prev = v;
        }
    }
    Ok(count)
}

/// Frequency and normalized eigenfunction of mode `(m, n, parity)`.
///
/// Scans `k` upward for sign changes of `R_n(ξ₀; q(k))`, refines each with
/// Brent's method, and accepts the root whose radial factor has exactly `m`
/// interior zeros.
pub fn ellipse_mode_frequency(m: u32, n: u32, parity: Parity, a1: f64, a2: f64) -> Result<EllipseMode> {
    check_axes(a1, a2)?;
    if parity == Parity::Odd && n == 0 {
        return Err(Error::InvalidArgument("odd modes start at n = 1".into()));
    }
    let c = (a1 * a1 - a2 * a2).sqrt();
    let xi0 = (a2 / a1).atanh();
    let q_of = |k: f64| (0.5 * k * c).powi(2);
    let f = |k: f64| radial_at(n, parity, q_of(k), xi0);
    let mut k_prev = SCAN_STEP;
    let mut f_prev = f(k_prev)?;
    let mut seen = 0u32;
    while k_prev < SCAN_K_MAX {
        let k_next = k_prev + SCAN_STEP;
        let f_next = f(k_next)?;
        if (f_prev > 0.0) != (f_next > 0.0) || f_next == 0.0 {
            let k = brent(f, k_prev, k_next, 1e-14 * k_next)?;
            let q = q_of(k);
            let coeffs = mathieu_coefficients(n, parity, q)?;
            let zeros = interior_zeros(&coeffs, xi0)?;
            if zeros == m {
                let mut mode =
                    EllipseMode { parity, m, n, k, q, a: coeffs.a, xi0, a1, a2, focal: c, norm: 1.0, coeffs };
                mode.norm = 1.0 / discrete_norm(&mode)?;
                return Ok(mode);
            }
            seen += 1;
            if zeros > m || seen > m + 8 {
                break;
            }
        }
        k_prev = k_next;
        f_prev = f_next;
    }
    Err(Error::BracketNotFound { m, n, parity: parity.as_char(), k_lo: SCAN_STEP, k_hi: k_prev.min(SCAN_K_MAX) })
}

/// `(ξ, η)` of a point, `ξ ≥ 0`, `η ∈ (−π, π]`.
pub fn elliptic_coords(focal: f64, p: Point) -> (f64, f64) {
    let w = (C64::new(p[0], p[1]) / focal).acosh();
    // principal acosh has Re ≥ 0; pin η to the sign of y off the focal segment
    let (xi, mut eta) = (w.re.max(0.0), w.im);
    if p[1] != 0.0 && eta != 0.0 && (eta > 0.0) != (p[1] > 0.0) {
        eta = -eta;
    }
    (xi, eta)
}

impl EllipseMode {
    pub fn label(&self) -> alloc::string::String {
        alloc::format!("{}:{}:{}", self.parity.as_char(), self.m, self.n)
    }

    pub fn contains(&self, p: Point) -> bool {
        (p[0] / self.a1).powi(2) + (p[1] / self.a2).powi(2) <= 1.0 + 1e-12
    }

    /// Normalized radial and angular factors with their derivatives:
    /// `(R, ∂_ξ R, Θ, ∂_η Θ)`, where the field is `R·Θ`.
    pub fn factors(&self, xi: f64, eta: f64) -> Result<(f64, f64, f64, f64)> {
        let (r, dr) = self.coeffs.radial(xi)?;
        let (t, dt) = self.coeffs.angular(eta);
        Ok((self.norm * r, self.norm * dr, t, dt))
    }

    /// Unnormalized-free field value inside the closed ellipse.
    pub fn field(&self, p: Point) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::OutsideDomain { x: p[0], y: p[1] });
        }
        let (xi, eta) = elliptic_coords(self.focal, p);
        let (r, _, t, _) = self.factors(xi.min(self.xi0), eta)?;
        Ok(r * t)
    }

    /// Field extended by zero outside the ellipse.
    pub fn field_or_zero(&self, p: Point) -> Result<f64> {
        if self.contains(p) {
            self.field(p)
        } else {
            Ok(0.0)
        }
    }
}

/// Field value of a mode at `p`; errors outside the ellipse.
pub fn ellipse_mode_field(mode: &EllipseMode, p: Point) -> Result<f64> {
    mode.field(p)
}

/// `L²(E)` norm of the current field by the 400×400 bounding-box midpoint rule.
fn discrete_norm(mode: &EllipseMode) -> Result<f64> {
    let n = NORMALIZATION_GRID;
    let (hx, hy) = (2.0 * mode.a1 / n as f64, 2.0 * mode.a2 / n as f64);
    let mut sum = 0.0;
    for i in 0..n {
        let x = -mode.a1 + (i as f64 + 0.5) * hx;
        for j in 0..n {
            let y = -mode.a2 + (j as f64 + 0.5) * hy;
            if mode.contains([x, y]) {
                let v = mode.field([x, y])?;
                sum += v * v;
            }
        }
    }
    Ok((sum * hx * hy).sqrt())
}

/// FEM approximation of one ellipse mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FemOracle {
    pub k: f64,
    pub h: f64,
    pub ndof: usize,
    /// `|⟨u_h, u⟩_M| / (‖u_h‖_M ‖u‖_M)` against the Mathieu field.
    pub overlap: f64,
}

/// Dirichlet eigenpairs `λ ≈ σ` of `−Δ` on the interior of `boundary`.
pub fn fem_dirichlet_eigenpairs<F: Factorizer>(
    boundary: BoundaryCurveSet,
    h: f64,
    sigma: f64,
    nev: usize,
    factorizer: &F,
) -> Result<(Mesh, AssembledFem, Vec<(f64, Vec<C64>)>)> {
    if !(h > 0.0) {
        return Err(Error::NonPositiveArgument { x: h });
    }
    let mesh = generate_mesh_sized(&MeshDomain::interior_of(boundary), &|_| h, MeshOptions::default())?;
    let fem = assemble_dirichlet(&mesh)?;
    let a = crate::sparse::linear_combination(1.0, &fem.k, -sigma, &fem.m)?.map(|v| C64::new(v, 0.0));
    let factor = factorizer.factorize(&a)?;
    let pencil = SparsePencil::new(a, fem.m.clone())?;
    let pairs = shift_invert(&pencil, &factor, &KrylovOptions::new(nev.min(fem.ndof())))?;
    let out = pairs.into_iter().map(|p| (sigma + p.mu.re, p.vector)).collect();
    Ok((mesh, fem, out))
}

/// Brute-force P1 oracle for an ellipse mode: solves the FEM Dirichlet
/// problem near `k²` and picks the eigenvector best aligned with the
/// Mathieu field.
pub fn fem_ellipse_oracle<F: Factorizer>(mode: &EllipseMode, h: f64, factorizer: &F) -> Result<FemOracle> {
    let boundary = BoundaryCurveSet::ellipse([0.0, 0.0], mode.a1, mode.a2, BoundaryTag::GammaD);
    let (mesh, fem, pairs) = fem_dirichlet_eigenpairs(boundary, h, mode.k * mode.k, 6, factorizer)?;
    let exact: Vec<f64> =
        fem.node_of_dof.iter().map(|&v| mode.field_or_zero(mesh.nodes[v])).collect::<Result<_>>()?;
    let mut mf = vec![0.0; fem.ndof()];
    fem.m.matvec(&exact, &mut mf);
    let ff: f64 = exact.iter().zip(&mf).map(|(a, b)| a * b).sum();
    let mut scored: Vec<(f64, f64)> = pairs
        .iter()
        .map(|(lam, u)| {
            let mut mu = vec![C64::new(0.0, 0.0); u.len()];
            fem.m.matvec(u, &mut mu);
            let uu: f64 = u.iter().zip(&mu).map(|(a, b)| (a.conj() * b).re).sum();
            let uf: C64 = mu.iter().zip(&exact).map(|(a, b)| a * b).sum();
            (uf.norm() / (uu * ff).sqrt(), *lam)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(core::cmp::Ordering::Equal));
    let (best, lam) = scored[0];
    let runner_up = scored.get(1).map_or(0.0, |s| s.0);
    if best < 0.9 || runner_up > 0.3 {
        return Err(Error::AmbiguousMode(alloc::format!(
            "mode {} at h = {h}: best overlap {best:.3}, runner-up {runner_up:.3}",
            mode.label()
        )));
    }
    Ok(FemOracle { k: lam.max(0.0).sqrt(), h, ndof: fem.ndof(), overlap: best })
}

/// Richardson extrapolation of two P1 eigenvalue solves at `h` and `h/2`
/// (error ∝ h²), returned as a frequency.
pub fn richardson(coarse: &FemOracle, fine: &FemOracle) -> f64 {
    let r = (coarse.h / fine.h).powi(2);
    let lam = (r * fine.k * fine.k - coarse.k * coarse.k) / (r - 1.0);
    lam.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_round_trip() {
        let c = 0.8;
        for &(xi, eta) in &[(0.3, 0.4), (0.5, -2.0), (1.1, 3.0), (0.2, -0.1)] {
            let p = [c * f64::cosh(xi) * f64::cos(eta), c * f64::sinh(xi) * f64::sin(eta)];
            let (x2, e2) = elliptic_coords(c, p);
            assert!((x2 - xi).abs() < 1e-12 && (e2 - eta).abs() < 1e-12, "{xi},{eta} -> {x2},{e2}");
        }
    }

    #[test]
    fn bad_axes_rejected() {
        assert!(ellipse_mode_frequency(0, 0, Parity::Even, 0.5, 1.0).is_err());
        assert!(ellipse_mode_frequency(0, 0, Parity::Odd, 1.0, 0.5).is_err());
    }
}
