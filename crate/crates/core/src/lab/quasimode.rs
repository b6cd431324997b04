//! Quasimodes built from ellipse eigenfunctions cut off inside the cavity.
//!
//! The ellipse field `u` vanishes on the whole ellipse, but only the arc
//! `|η| ≤ φ₀` is part of `Γ_D`; across the opening the zero extension of `u`
//! has a jump in normal derivative. The cut-off therefore acts on the
//! elliptic angle: `χ = 1` for `|η| ≤ core`, a quintic step down to zero on
//! the collar `core < |η| < edge`, and `χ = 0` beyond. With `χ = χ(η)`,
//!
//! `(Δ + k²)(χu) = (χ''u + 2χ'∂_η u) / J`,  `J = c²(sinh²ξ + sin²η)`,
//!
//! so `‖(Δ + k²)(χu)‖² = ∫∫ (χ''u + 2χ'∂_η u)² / J dξ dη` over the collar.
//! Both this and `‖χu‖` are computed by composite Gauss–Legendre in `(ξ, η)`,
//! independent of any FEM mesh.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ellipse::EllipseMode;
use crate::geometry::{CavitySpec, GAUSS8};
use crate::{Error, Result};

/// Smallest allowed gap between the cut-off support and the cavity opening.
const SUPPORT_MARGIN: f64 = 0.05;
const XI_PANELS: usize = 24;
const CORE_PANELS: usize = 48;
const COLLAR_PANELS: usize = 24;

/// Cut-off `χ(η)` in the elliptic angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSpec {
    /// `χ ≡ 1` for `|η| ≤ core`.
    pub core: f64,
    /// `χ ≡ 0` for `|η| ≥ edge`.
    pub edge: f64,
}

/// `6t⁵ − 15t⁴ + 10t³` and its first two derivatives.
fn smoothstep(t: f64) -> (f64, f64, f64) {
    let t = t.clamp(0.0, 1.0);
    let t2 = t * t;
    (t2 * t * (10.0 - 15.0 * t + 6.0 * t2), 30.0 * t2 * (1.0 - t) * (1.0 - t), 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t))
}

impl CutoffSpec {
    pub fn new(core: f64, edge: f64) -> Result<Self> {
        if !(core > 0.0 && edge > core && edge < core::f64::consts::PI) {
            return Err(Error::InvalidArgument(alloc::format!("cut-off needs 0 < core < edge < π, got ({core}, {edge})")));
        }
        Ok(CutoffSpec { core, edge })
    }

    /// Collar ending [`Self::DEFAULT_GAP`] short of the opening, of width
    /// [`Self::DEFAULT_WIDTH`].
    pub fn for_cavity(cavity: &CavitySpec) -> Result<Self> {
        let edge = cavity.phi0 - Self::DEFAULT_GAP;
        Self::new(edge - Self::DEFAULT_WIDTH, edge)
    }

    pub const DEFAULT_GAP: f64 = 0.1;
    pub const DEFAULT_WIDTH: f64 = 0.5;

    /// Cut-off that is `≡ 1` wherever the angular factor exceeds
    /// [`Self::ADAPT_TOL`] of its maximum, with a collar of
    /// [`Self::ADAPT_WIDTH`] beyond (shortened if it would reach `π`).
    /// Independent of the cavity, so the support check is meaningful.
    pub fn adapted(mode: &EllipseMode) -> Result<Self> {
        const SAMPLES: usize = 4096;
        let pi = core::f64::consts::PI;
        let theta: Vec<f64> = (0..=SAMPLES)
            .map(|i| mode.factors(0.0, pi * i as f64 / SAMPLES as f64).map(|f| f.2.abs()))
            .collect::<Result<_>>()?;
        let peak = theta.iter().copied().fold(0.0, f64::max);
        let last = theta.iter().rposition(|&t| t >= Self::ADAPT_TOL * peak).unwrap_or(0);
        let core = (pi * last as f64 / SAMPLES as f64).max(1e-3);
        let edge = (core + Self::ADAPT_WIDTH).min(0.5 * (core + pi));
        Self::new(core, edge)
    }

    pub const ADAPT_TOL: f64 = 0.05;
    pub const ADAPT_WIDTH: f64 = 0.3;

    /// `(χ, dχ/dη, d²χ/dη²)`.
    pub fn eval(&self, eta: f64) -> (f64, f64, f64) {
        let a = eta.abs();
        if a <= self.core {
            return (1.0, 0.0, 0.0);
        }
        if a >= self.edge {
            return (0.0, 0.0, 0.0);
        }
        let w = self.edge - self.core;
        let (s, ds, d2s) = smoothstep((self.edge - a) / w);
        // t decreases as |η| grows
        (s, -eta.signum() * ds / w, d2s / (w * w))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuasimodeReport {
    pub mode: EllipseMode,
    pub cavity: CavitySpec,
    pub cutoff: CutoffSpec,
    /// `‖(Δ + k²)(χu)‖` with `‖u‖_{L²(E)} = 1`.
    pub eps_raw: f64,
    /// `‖χu‖`.
    pub norm_check: f64,
    /// `eps_raw / norm_check`, the quality of the normalized quasimode.
    pub eps: f64,
    /// The support of `χu` stays inside the covered arc with a margin.
    pub support_ok: bool,
}

impl QuasimodeReport {
    pub fn k(&self) -> f64 {
        self.mode.k
    }

    pub fn label(&self) -> String {
        self.mode.label()
    }
}

/// Composite 8-point Gauss nodes on `[a, b]`.
fn gauss_nodes(a: f64, b: f64, panels: usize, out: &mut Vec<(f64, f64)>) {
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in GAUSS8 {
            out.push((mid + 0.5 * h * x, 0.5 * h * w));
        }
    }
}

struct Grid {
    xi: Vec<(f64, f64)>,
    eta: Vec<(f64, f64)>,
}

fn grid(mode: &EllipseMode, cutoff: &CutoffSpec) -> Grid {
    let mut xi = Vec::new();
    gauss_nodes(0.0, mode.xi0, XI_PANELS, &mut xi);
    let mut eta = Vec::new();
    gauss_nodes(-cutoff.edge, -cutoff.core, COLLAR_PANELS, &mut eta);
    gauss_nodes(-cutoff.core, cutoff.core, CORE_PANELS, &mut eta);
    gauss_nodes(cutoff.core, cutoff.edge, COLLAR_PANELS, &mut eta);
    Grid { xi, eta }
}

/// `(R(ξ_i))` and `(Θ(η_j), Θ'(η_j))` on the grid, normalized.
fn sampled(mode: &EllipseMode, g: &Grid) -> Result<(Vec<f64>, Vec<(f64, f64)>)> {
    let mut r = Vec::with_capacity(g.xi.len());
    for &(xi, _) in &g.xi {
        r.push(mode.factors(xi, 0.0)?.0);
    }
    let mut t = Vec::with_capacity(g.eta.len());
    for &(eta, _) in &g.eta {
        let (_, _, th, dth) = mode.factors(0.0, eta)?;
        t.push((th, dth));
    }
    Ok((r, t))
}

fn check_match(mode: &EllipseMode, cavity: &CavitySpec) -> Result<()> {
    let (a1, a2) = cavity.inner_axes;
    if (mode.a1 - a1).abs() > 1e-12 * a1 || (mode.a2 - a2).abs() > 1e-12 * a2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "mode ellipse ({}, {}) is not the cavity's inner ellipse ({a1}, {a2})",
            mode.a1,
            mode.a2
        )));
    }
    Ok(())
}

/// Quality of the cut-off ellipse mode as a quasimode of the cavity.
pub fn quasimode_quality(mode: &EllipseMode, cavity: &CavitySpec, cutoff: &CutoffSpec) -> Result<QuasimodeReport> {
    check_match(mode, cavity)?;
    cavity.validate()?;
    let g = grid(mode, cutoff);
    let (r, t) = sampled(mode, &g)?;
    let c2 = mode.focal * mode.focal;
    let mut res2 = 0.0;
    let mut norm2 = 0.0;
    for (j, &(eta, weta)) in g.eta.iter().enumerate() {
        let (chi, dchi, d2chi) = cutoff.eval(eta);
        let (th, dth) = t[j];
        let s2 = eta.sin().powi(2);
        for (i, &(xi, wxi)) in g.xi.iter().enumerate() {
            let jac = c2 * (xi.sinh().powi(2) + s2);
            let u = r[i] * th;
            let w = wxi * weta;
            norm2 += w * chi * chi * u * u * jac;
            if dchi != 0.0 || d2chi != 0.0 {
                let f = d2chi * u + 2.0 * dchi * r[i] * dth;
                res2 += w * f * f / jac;
            }
        }
    }
    let eps_raw = res2.sqrt();
    let norm_check = norm2.sqrt();
    let support_ok = cutoff.edge <= cavity.phi0 - SUPPORT_MARGIN;
    Ok(QuasimodeReport {
        mode: mode.clone(),
        cavity: *cavity,
        cutoff: *cutoff,
        eps_raw,
        norm_check,
        eps: eps_raw / norm_check,
        support_ok,
    })
}

/// Window multiplicity and pairwise overlaps of cut-off modes.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplicity {
    pub window: (f64, f64),
    /// Labels of the modes with `k` in the window, in input order.
    pub labels: Vec<String>,
    pub m: usize,
    /// `|⟨χu_i, χu_j⟩| / (‖χu_i‖ ‖χu_j‖)`.
    pub overlap: Vec<Vec<f64>>,
    /// Largest normalized quality among the modes in the window, used as the
    /// near-orthogonality threshold.
    pub eps_threshold: f64,
    /// Pairs `(i, j)`, `i < j`, whose overlap exceeds the threshold.
    pub violations: Vec<(usize, usize)>,
}

/// Counts the reports whose frequency lies in `[k₋, k₊]` and computes their
/// overlap matrix on a common quadrature.
pub fn multiplicity_in_window(reports: &[QuasimodeReport], window: (f64, f64)) -> Result<Multiplicity> {
    let (lo, hi) = window;
    if !(lo <= hi) {
        return Err(Error::InvalidArgument(alloc::format!("window [{lo}, {hi}] is reversed")));
    }
    let inside: Vec<&QuasimodeReport> = reports.iter().filter(|r| r.k() >= lo && r.k() <= hi).collect();
    if let Some(first) = inside.first() {
        if inside.iter().any(|r| r.cavity != first.cavity || r.cutoff != first.cutoff) {
            return Err(Error::InvalidArgument("all reports must share the cavity and cut-off".into()));
        }
    }
    let m = inside.len();
    let mut overlap = vec![vec![0.0; m]; m];
    if m > 0 {
        let cutoff = inside[0].cutoff;
        let g = grid(&inside[0].mode, &cutoff);
        let c2 = inside[0].mode.focal.powi(2);
        let fields: Vec<(Vec<f64>, Vec<(f64, f64)>)> =
            inside.iter().map(|r| sampled(&r.mode, &g)).collect::<Result<_>>()?;
        let mut gram = vec![vec![0.0; m]; m];
        for (j, &(eta, weta)) in g.eta.iter().enumerate() {
            let chi = cutoff.eval(eta).0;
            let s2 = eta.sin().powi(2);
            for (i, &(xi, wxi)) in g.xi.iter().enumerate() {
                let w = wxi * weta * chi * chi * c2 * (xi.sinh().powi(2) + s2);
                for a in 0..m {
                    let ua = fields[a].0[i] * fields[a].1[j].0;
                    for b in a..m {
                        gram[a][b] += w * ua * fields[b].0[i] * fields[b].1[j].0;
                    }
                }
            }
        }
        for a in 0..m {
            for b in a..m {
                let v = gram[a][b].abs() / (gram[a][a] * gram[b][b]).sqrt();
                overlap[a][b] = v;
                overlap[b][a] = v;
            }
        }
    }
    let eps_threshold = inside.iter().map(|r| r.eps).fold(0.0, f64::max);
    let mut violations = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            if overlap[a][b] > eps_threshold {
                violations.push((a, b));
            }
        }
    }
    Ok(Multiplicity { window, labels: inside.iter().map(|r| r.label()).collect(), m, overlap, eps_threshold, violations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_is_c2() {
        let c = CutoffSpec::new(1.0, 1.5).unwrap();
        for &e in &[1.0, 1.5, -1.0, -1.5] {
            let (_, d, d2) = c.eval(e);
            assert!(d.abs() < 1e-12 && d2.abs() < 1e-9, "{e}: {d} {d2}");
        }
        // derivative matches a central difference
        let h = 1e-6;
        for &e in &[1.1, 1.3, -1.2] {
            let (_, d, d2) = c.eval(e);
            let fd = (c.eval(e + h).0 - c.eval(e - h).0) / (2.0 * h);
            let fd2 = (c.eval(e + h).1 - c.eval(e - h).1) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6 && (d2 - fd2).abs() < 1e-5);
        }
        assert!(CutoffSpec::new(1.5, 1.0).is_err());
    }
}
