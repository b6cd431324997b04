//! Dirichlet-to-Neumann map on the truncation circle.
//!
//! Two realizations of the Galerkin DtN on the uniform P1 space of the circle:
//!
//! * boundary integrals: `D(k) = (−½I + D′_k) S_k⁻¹` with the single layer
//!   `S_k` and adjoint double layer `D′_k` assembled on the exact arcs;
//! * the Fourier–Hankel symbol `d_n = k H_n′(kR) / H_n(kR)` summed over all
//!   aliases of each discrete mode.
//!
//! On a uniform circle every Galerkin matrix here is a symmetric circulant,
//! so each entry reduces to a 1-D integral of the kernel against the
//! autocorrelation of two hats (a cubic B-spline), and products and inverses
//! diagonalize under the discrete Fourier transform.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

#[allow(unused_imports)]
use num_traits::Float;

use crate::fem::{boundary_mass_row, CircleSpace};
use crate::geometry::GAUSS8;
use crate::linalg::DMat;
use crate::specfun::{hankel01, hankel_ratio_sequence};
use crate::{Error, Result, C64};

/// Smallest admissible `min|σ| / max|σ|` of the single-layer matrix.
pub const SINGLE_LAYER_RCOND_MIN: f64 = 1e-8;

/// Nodes and weights of the 8-point Gauss rule for `∫₀¹ f(u) (−ln u) du`.
const GAUSS_LOG8: [(f64, f64); 8] = [
    (0.013_320_244_160_892_465, 0.164_416_604_728_002_89),
    (0.079_750_429_013_894_938, 0.237_525_610_023_306_02),
    (0.197_871_029_326_188_05, 0.226_841_984_431_919_13),
    (0.354_153_994_351_909_42, 0.175_754_079_006_070_24),
    (0.529_458_575_234_917_28, 0.112_924_030_246_759_05),
    (0.701_814_529_939_099_96, 0.057_872_210_717_782_072),
    (0.849_379_320_441_106_68, 0.020_979_073_742_132_978),
    (0.953_326_450_056_359_79, 0.003_686_407_104_027_619),
];

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Symmetric circulant matrix stored by its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct Circulant {
    pub row: Vec<C64>,
}

impl Circulant {
    pub fn len(&self) -> usize {
        self.row.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let m = self.len();
        self.row[(j + m - i % m) % m]
    }

    pub fn to_dense(&self) -> DMat {
        DMat::from_fn(self.len(), self.len(), |i, j| self.get(i, j))
    }

    /// Eigenvalue for the discrete mode `e^{ipθ_j}`, `p = 0..m`.
    pub fn symbol(&self) -> Vec<C64> {
        dft(&self.row, 1.0)
    }

    fn from_symbol(sym: &[C64]) -> Self {
        let m = sym.len() as f64;
        Circulant { row: dft(sym, -1.0).into_iter().map(|v| v / m).collect() }
    }
}

/// `out_p = Σ_j x_j e^{sign·2πi pj/m}`, direct O(m²) evaluation.
fn dft(x: &[C64], sign: f64) -> Vec<C64> {
    let m = x.len();
    let tw: Vec<C64> = (0..m).map(|l| C64::from_polar(1.0, sign * TAU * l as f64 / m as f64)).collect();
    (0..m).map(|p| x.iter().enumerate().map(|(j, v)| v * tw[(p * j) % m]).sum()).collect()
}

fn bspline3(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else if a < 2.0 {
        (2.0 - a).powi(3) / 6.0
    } else {
        0.0
    }
}

/// A kernel on the circle as a function of the angle `α` between the two
/// points: full value, and the coefficient of `ln|α|` in its singular split.
type SplitKernel<'a> = dyn Fn(f64) -> Result<(C64, C64)> + 'a;

/// `∫ G(Δ(t − j)) B₃(t) dt`, the shape-function-weighted kernel integral that
/// gives circulant entry `j`.
fn circulant_entry(j: usize, delta: f64, kernel: &SplitKernel) -> Result<C64> {
    let jf = j as f64;
    let mut total = ZERO;
    for a in [-2.0, -1.0, 0.0, 1.0] {
        let b = a + 1.0;
        if j <= 2 && (a == jf || b == jf) {
            // t = j ± u, log singular at u = 0
            let dir = if a == jf { 1.0 } else { -1.0 };
            for (u, w) in GAUSS_LOG8 {
                let t = jf + dir * u;
                let (_, f1) = kernel(dir * delta * u)?;
                total -= f1 * (w * bspline3(t));
            }
            for (x, w) in GAUSS8 {
                let u = 0.5 * (x + 1.0);
                let t = jf + dir * u;
                let alpha = dir * delta * u;
                let (g, f1) = kernel(alpha)?;
                let smooth = g - f1 * alpha.abs().ln() + f1 * delta.ln();
                total += smooth * (0.5 * w * bspline3(t));
            }
        } else {
            // subdivide near the singular point to keep Gauss at full accuracy
            let pieces = if j <= 4 { 4 } else { 1 };
            let h = 1.0 / pieces as f64;
            for s in 0..pieces {
                let lo = a + s as f64 * h;
                for (x, w) in GAUSS8 {
                    let t = lo + 0.5 * h * (x + 1.0);
                    let (g, _) = kernel(delta * (t - jf))?;
                    total += g * (0.5 * h * w * bspline3(t));
                }
            }
        }
    }
    Ok(total)
}

fn check_space(space: &CircleSpace, k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::NonPositiveArgument { x: k });
    }
    if !(space.radius > 0.0) {
        return Err(Error::NonPositiveArgument { x: space.radius });
    }
    if space.len() < 8 {
        return Err(Error::InvalidArgument(alloc::format!("{} boundary nodes; need at least 8", space.len())));
    }
    Ok(())
}

fn assemble_circulant(space: &CircleSpace, kernel: &SplitKernel) -> Result<Circulant> {
    let m = space.len();
    let delta = space.spacing();
    let scale = space.radius * space.radius * delta * delta;
    let half: Vec<C64> = (0..=m / 2).map(|j| circulant_entry(j, delta, kernel).map(|v| v * scale)).collect::<Result<_>>()?;
    Ok(Circulant { row: (0..m).map(|j| half[j.min(m - j)]).collect() })
}

fn chord(radius: f64, alpha: f64) -> f64 {
    2.0 * radius * (0.5 * alpha).sin().abs()
}

/// Galerkin single layer `⟨S_k ψ_j, ψ_i⟩` with `Φ_k = (i/4) H₀(k|x − y|)`.
pub fn assemble_single_layer(space: &CircleSpace, k: f64) -> Result<Circulant> {
    check_space(space, k)?;
    let r0 = space.radius;
    let kernel = move |alpha: f64| -> Result<(C64, C64)> {
        let (h0, _) = hankel01(k * chord(r0, alpha))?;
        Ok((C64::new(0.0, 0.25) * h0, C64::new(-h0.re / TAU, 0.0)))
    };
    assemble_circulant(space, &kernel)
}

/// Kernel of the adjoint double layer on a circle of radius `R` at angular
/// separation `α`: `∂_{n_x} Φ_k = −(ik/4) H₁(kr) (x−y)·n_x / r`, which on the
/// circle equals `−(i/8R) kr H₁(kr)` and tends to `−1/(4πR)` as `r → 0`.
pub fn adjoint_double_layer_kernel(k: f64, radius: f64, alpha: f64) -> Result<C64> {
    let z = k * chord(radius, alpha);
    if z < 1e-8 {
        return Ok(C64::new(-1.0 / (4.0 * PI * radius), 0.0));
    }
    let (_, h1) = hankel01(z)?;
    Ok(C64::new(0.0, -1.0 / (8.0 * radius)) * h1 * z)
}

/// Galerkin adjoint double layer `⟨D′_k ψ_j, ψ_i⟩`, with `D′_k = γ₁𝒮_k − I/2`
/// (trace from inside, normal pointing out of the disc).
pub fn assemble_adjoint_double_layer(space: &CircleSpace, k: f64) -> Result<Circulant> {
    check_space(space, k)?;
    let r0 = space.radius;
    let kernel = move |alpha: f64| -> Result<(C64, C64)> {
        let z = k * chord(r0, alpha);
        let (_, h1) = hankel01(z)?;
        let g = C64::new(0.0, -1.0 / (8.0 * r0)) * h1 * z;
        Ok((g, C64::new(z * h1.re / (4.0 * PI * r0), 0.0)))
    };
    assemble_circulant(space, &kernel)
}

/// `d_n = k H_n′(kR) / H_n(kR)`.
pub fn fourier_dtn_symbol(n: i64, k: f64, radius: f64) -> Result<C64> {
    if !(k > 0.0) || !(radius > 0.0) {
        return Err(Error::NonPositiveArgument { x: k.min(radius) });
    }
    let n = n.unsigned_abs() as usize;
    let x = k * radius;
    let rho = hankel_ratio_sequence(n.max(1), x)?;
    Ok(symbol_from_ratios(n, k, radius, &rho))
}

/// `d_n` from ratios `ρ_n = H_n/H_{n−1}`: `H_n′ = H_{n−1} − (n/x) H_n` gives
/// `d_n = −n/R + k/ρ_n`, and `d_0 = −k ρ_1`.
fn symbol_from_ratios(n: usize, k: f64, radius: f64, rho: &[C64]) -> C64 {
    if n == 0 {
        -rho[1] * k
    } else {
        rho[n].inv() * k - n as f64 / radius
    }
}

/// Hurwitz zeta `ζ(3, a) = Σ_{i≥0} (i + a)⁻³` for `a > 0`, by Euler–Maclaurin.
fn hurwitz_zeta3(a: f64) -> f64 {
    const N: usize = 16;
    let mut s: f64 = (0..N).map(|i| (i as f64 + a).powi(-3)).sum();
    let x = N as f64 + a;
    // tail: ∫ + f/2 − Σ B_{2j}/(2j)! f^{(2j−1)}
    s += 0.5 / (x * x) + 0.5 / x.powi(3) + 0.25 / x.powi(4) - 1.0 / (12.0 * x.powi(6)) + 1.0 / (12.0 * x.powi(8));
    s
}

/// Eigenvalues `τ_p` of the exact Galerkin DtN on the uniform P1 circle
/// space: `τ_p = RΔ Σ_q d_{p+qM} sinc⁴((p+qM)Δ/2)`.
fn fourier_galerkin_symbol(m: usize, k: f64, radius: f64) -> Result<Vec<C64>> {
    const ALIASES: usize = 200;
    let delta = TAU / m as f64;
    let nmax = (ALIASES + 1) * m;
    let rho = hankel_ratio_sequence(nmax, k * radius)?;
    let mut out = Vec::with_capacity(m);
    out.push(symbol_from_ratios(0, k, radius, &rho) * (radius * delta));
    for p in 1..m {
        let s4 = (0.5 * p as f64 * delta).sin().powi(4);
        let c = 16.0 * s4 / delta.powi(4);
        // evanescent part −|n|/R summed in closed form over all aliases
        let a = p as f64 / m as f64;
        let lead = -c / radius * (hurwitz_zeta3(a) + hurwitz_zeta3(1.0 - a)) / (m as f64).powi(3);
        // remainder k/ρ_|n| decays like |n|⁻⁵ after weighting
        let mut rest = ZERO;
        for q in -(ALIASES as i64)..=(ALIASES as i64) {
            let n = p as i64 + q * m as i64;
            let na = n.unsigned_abs() as usize;
            if na > nmax {
                continue;
            }
            rest += rho[na].inv() * (k * c / (n as f64).powi(4));
        }
        out.push((rest + lead) * (radius * delta));
    }
    Ok(out)
}

/// Boundary-integral operators on the circle space.
#[derive(Debug, Clone, PartialEq)]
pub struct BemOperators {
    pub k: f64,
    pub radius: f64,
    pub s: Circulant,
    pub dp: Circulant,
    /// First row of the boundary mass matrix.
    pub mass: Vec<f64>,
    /// `min|σ|/max|σ|` over the eigenvalues of `S`.
    pub rcond_s: f64,
}

/// Assembles `S_k`, `D′_k` and checks that `S_k` is safely invertible.
pub fn bem_operators(space: &CircleSpace, k: f64) -> Result<BemOperators> {
    let s = assemble_single_layer(space, k)?;
    let dp = assemble_adjoint_double_layer(space, k)?;
    let sym = s.symbol();
    let hi = sym.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let lo = sym.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let rcond_s = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(rcond_s >= SINGLE_LAYER_RCOND_MIN) {
        return Err(Error::SingularSingleLayer { k, rcond: rcond_s });
    }
    Ok(BemOperators { k, radius: space.radius, s, dp, mass: boundary_mass_row(space), rcond_s })
}

impl BemOperators {
    /// Eigenvalues of the nodal DtN `M_b⁻¹ (−½M_b + D′) S⁻¹ M_b`.
    pub fn dtn_symbol(&self) -> Vec<C64> {
        let ms = mass_symbol(&self.mass);
        let ss = self.s.symbol();
        let ds = self.dp.symbol();
        (0..ms.len()).map(|p| (ds[p] - ms[p] * 0.5) / ss[p]).collect()
    }
}

fn mass_symbol(row: &[f64]) -> Vec<C64> {
    let c: Vec<C64> = row.iter().map(|&v| C64::new(v, 0.0)).collect();
    dft(&c, 1.0)
}

/// The Galerkin DtN `⟨D(k) ψ_j, ψ_i⟩` computed from the Fourier symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierDtn {
    pub k: f64,
    pub radius: f64,
    pub galerkin: Circulant,
    pub mass: Vec<f64>,
}

pub fn fourier_dtn(space: &CircleSpace, k: f64) -> Result<FourierDtn> {
    check_space(space, k)?;
    let sym = fourier_galerkin_symbol(space.len(), k, space.radius)?;
    Ok(FourierDtn { k, radius: space.radius, galerkin: Circulant::from_symbol(&sym), mass: boundary_mass_row(space) })
}

impl FourierDtn {
    /// Eigenvalues of the nodal DtN `M_b⁻¹ T`.
    pub fn dtn_symbol(&self) -> Vec<C64> {
        let ms = mass_symbol(&self.mass);
        self.galerkin.symbol().into_iter().zip(ms).map(|(t, m)| t / m).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DtnBackend {
    Bem,
    Fourier,
}

impl DtnBackend {
    pub fn name(self) -> &'static str {
        match self {
            DtnBackend::Bem => "bem",
            DtnBackend::Fourier => "fourier",
        }
    }

    pub fn by_name(s: &str) -> Option<Self> {
        match s {
            "bem" => Some(DtnBackend::Bem),
            "fourier" => Some(DtnBackend::Fourier),
            _ => None,
        }
    }
}

/// Nodal Neumann data of the outgoing extension of the trace `g`.
///
/// `Bem` treats `g` as a P1 trace and applies `(−½M_b + D′)S⁻¹` through the
/// mass matrix. `Fourier` reads `g` through its discrete Fourier modes and
/// multiplies mode `n` (signed, `|n| ≤ M/2`) by `d_n`. The coupled system
/// uses the Galerkin form [`fourier_dtn`] instead.
pub fn dtn_apply(space: &CircleSpace, k: f64, trace: &[C64], backend: DtnBackend) -> Result<Vec<C64>> {
    if trace.len() != space.len() {
        return Err(Error::Dimension(alloc::format!("trace of length {} on {} nodes", trace.len(), space.len())));
    }
    let sym = match backend {
        DtnBackend::Bem => bem_operators(space, k)?.dtn_symbol(),
        DtnBackend::Fourier => {
            check_space(space, k)?;
            let m = space.len();
            (0..m)
                .map(|p| {
                    let n = if p <= m / 2 { p as i64 } else { p as i64 - m as i64 };
                    fourier_dtn_symbol(n, k, space.radius)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    let m = trace.len() as f64;
    let coeffs = dft(trace, -1.0);
    let scaled: Vec<C64> = coeffs.iter().zip(&sym).map(|(c, s)| c * s / m).collect();
    Ok(dft(&scaled, 1.0))
}
