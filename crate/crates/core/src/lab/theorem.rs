//! Single-frequency check of `|μ_min| ≤ k^α ε(k)`.

#[allow(unused_imports)]
use num_traits::Float;

use super::quasimode::{quasimode_quality, CutoffSpec};
use super::{min_abs_mu, spectrum_near_zero, Discretization, SpectrumOptions, Truncation};
use crate::ellipse::{fem_ellipse_oracle, EllipseMode};
use crate::geometry::CavitySpec;
use crate::linalg::Factorizer;
use crate::{Error, Result};

/// `3(d + 1)/2` for `d = 2`; the exponent must exceed it.
pub const ALPHA_MIN: f64 = 4.5;

/// Relative distance between `k` and the mode frequency below which the
/// mode counts as a quasimode at `k`.
const TUNING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremOutcome {
    Pass,
    Fail,
    /// `k` is not the quasimode frequency, so the bound says nothing.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck {
    pub k: f64,
    pub alpha: f64,
    pub mu_min: Option<f64>,
    /// Normalized quasimode quality `ε(k)`.
    pub eps: Option<f64>,
    /// `k^α ε(k)`.
    pub bound: Option<f64>,
    /// Discretization budget: `|λ_h − k²|` for the same mode computed by P1
    /// FEM on the ellipse at the cavity mesh size.
    pub budget: Option<f64>,
    pub outcome: TheoremOutcome,
}

/// Checks the bound at frequency `k` for the quasimode built from `mode`.
/// `h` is the mesh size in the cavity, used for the discretization budget.
#[allow(clippy::too_many_arguments)]
pub fn theorem1_check<F: Factorizer>(
    disc: &Discretization,
    cavity: &CavitySpec,
    mode: &EllipseMode,
    k: f64,
    alpha: f64,
    cutoff: &CutoffSpec,
    truncation: Truncation,
    opts: &SpectrumOptions,
    h: f64,
    factorizer: &F,
) -> Result<TheoremCheck> {
    if !(alpha > ALPHA_MIN) {
        return Err(Error::InvalidArgument(alloc::format!("alpha = {alpha} must exceed {ALPHA_MIN}")));
    }
    if !(k > 0.0) {
        return Err(Error::NonPositiveArgument { x: k });
    }
    if (k - mode.k).abs() > TUNING_TOL * mode.k {
        return Ok(TheoremCheck {
            k,
            alpha,
            mu_min: None,
            eps: None,
            bound: None,
            budget: None,
            outcome: TheoremOutcome::NotApplicable,
        });
    }
    let report = quasimode_quality(mode, cavity, cutoff)?;
    let spec = spectrum_near_zero(disc, k, truncation, opts, factorizer)?;
    let mu_min = min_abs_mu(&spec).ok_or(Error::NoConvergence { converged: 0, requested: opts.nev, iterations: 0 })?;
    let oracle = fem_ellipse_oracle(mode, h, factorizer)?;
    let budget = (oracle.k * oracle.k - k * k).abs();
    let bound = k.powf(alpha) * report.eps;
    let outcome = if mu_min <= bound + budget { TheoremOutcome::Pass } else { TheoremOutcome::Fail };
    Ok(TheoremCheck {
        k,
        alpha,
        mu_min: Some(mu_min),
        eps: Some(report.eps),
        bound: Some(bound),
        budget: Some(budget),
        outcome,
    })
}
