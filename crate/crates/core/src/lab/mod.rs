//! The spectral experiments: coupled FEM–DtN pencils on the cavity domains,
//! near-origin spectra, frequency sweeps with trajectory tracking, box
//! counting, quasimode quality and the single-frequency theorem check.

mod quasimode;
mod theorem;
mod trajectory;

pub use quasimode::{multiplicity_in_window, quasimode_quality, CutoffSpec, Multiplicity, QuasimodeReport};
pub use theorem::{theorem1_check, TheoremCheck, TheoremOutcome, ALPHA_MIN};
pub use trajectory::{box_count, box_members, k_grid, sweep, track_spectra, BoxSpec, Track, TrackPoint, TrajectorySet};

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::bem::{bem_operators, fourier_dtn, DtnBackend};
use crate::fem::{assemble_dirichlet, assemble_trace, AssembledFem, CircleSpace};
use crate::geometry::{CavitySpec, DomainSpec};
use crate::linalg::{shift_invert, Factorizer, KrylovOptions, Pencil, DEFAULT_SEED};
use crate::mesh::{generate_mesh_sized, meshwidth_rule, Mesh, MeshDomain, MeshOptions};
use crate::sparse::{linear_combination, Csr};
use crate::{Error, Point, Result, C64};

/// Condition imposed on the truncation circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truncation {
    /// Exact DtN map through one of the two backends.
    Dtn(DtnBackend),
    /// Homogeneous Dirichlet condition; gives a Hermitian control pencil.
    Dirichlet,
}

impl Truncation {
    pub fn name(self) -> &'static str {
        match self {
            Truncation::Dtn(b) => b.name(),
            Truncation::Dirichlet => "dirichlet",
        }
    }

    pub fn by_name(s: &str) -> Option<Self> {
        match s {
            "dirichlet" => Some(Truncation::Dirichlet),
            _ => DtnBackend::by_name(s).map(Truncation::Dtn),
        }
    }
}

/// How element sizes are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshPolicy {
    /// One edge length everywhere.
    Uniform(f64),
    /// `cavity` inside the inner ellipse (plus a margin), growing linearly
    /// with slope `grading` to `outer` away from it.
    Graded { cavity: f64, outer: f64, grading: f64 },
}

/// Smallest cavity element size of [`MeshPolicy::desk`]. The rule reaches it
/// at `k ≈ 14`; finer meshes exceed single-machine memory and time budgets.
pub const DESK_H_FLOOR: f64 = 0.004;

/// Margin around the inner ellipse that keeps the cavity size.
const CAVITY_MARGIN: f64 = 0.05;

impl MeshPolicy {
    /// Uniform `meshwidth_rule(k)`.
    pub fn rule(k: f64) -> Result<Self> {
        Ok(MeshPolicy::Uniform(meshwidth_rule(k)?))
    }

    /// Desk-scale default: `meshwidth_rule(k)` in the cavity but no finer
    /// than [`DESK_H_FLOOR`], twelve points per wavelength (at most 0.05)
    /// elsewhere.
    pub fn desk(k: f64) -> Result<Self> {
        let cavity = meshwidth_rule(k)?.max(DESK_H_FLOOR);
        let outer = (2.0 * core::f64::consts::PI / (12.0 * k)).min(0.05).max(cavity);
        Ok(MeshPolicy::Graded { cavity, outer, grading: 0.3 })
    }

    /// Finest edge length requested anywhere.
    pub fn h_min(&self) -> f64 {
        match *self {
            MeshPolicy::Uniform(h) => h,
            MeshPolicy::Graded { cavity, .. } => cavity,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            MeshPolicy::Uniform(h) => h > 0.0,
            MeshPolicy::Graded { cavity, outer, grading } => cavity > 0.0 && outer >= cavity && grading > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(alloc::format!("invalid mesh policy {self:?}")))
        }
    }

    /// Target edge length at `p`.
    pub fn size_at(&self, cavity_spec: Option<&CavitySpec>, p: Point) -> f64 {
        match *self {
            MeshPolicy::Uniform(h) => h,
            MeshPolicy::Graded { cavity, outer, grading } => {
                let Some(c) = cavity_spec else { return cavity };
                let (a1, a2) = c.inner_axes;
                // scaled level-set distance, exact on the axes
                let r = ((p[0] / a1).powi(2) + (p[1] / a2).powi(2)).sqrt();
                let d = (r - 1.0) * a2 - CAVITY_MARGIN;
                if d <= 0.0 {
                    cavity
                } else {
                    (cavity + grading * d).min(outer)
                }
            }
        }
    }
}

/// Meshes `Ω_tr` under a sizing policy.
pub fn lab_mesh(domain: &DomainSpec, policy: MeshPolicy) -> Result<Mesh> {
    policy.validate()?;
    domain.validate()?;
    let cavity = domain.cavity;
    let size = move |p: Point| policy.size_at(cavity.as_ref(), p);
    generate_mesh_sized(&MeshDomain::from_domain(domain), &size, MeshOptions::default())
}

/// Frequency-independent pieces of the discretization: mesh, stiffness and
/// mass with `Γ_D` eliminated, boundary space and trace coupling.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub fem: AssembledFem,
    pub space: CircleSpace,
    /// `Mtr`, boundary functions × volume dofs.
    pub trace: Csr<f64>,
}

impl Discretization {
    pub fn new(mesh: Mesh) -> Result<Self> {
        let fem = assemble_dirichlet(&mesh)?;
        let space = CircleSpace::from_mesh(&mesh)?;
        let trace = assemble_trace(&fem, &space)?;
        Ok(Discretization { mesh, fem, space, trace })
    }

    pub fn build(domain: &DomainSpec, policy: MeshPolicy) -> Result<Self> {
        Self::new(lab_mesh(domain, policy)?)
    }

    pub fn n_fem(&self) -> usize {
        self.fem.ndof()
    }

    /// The coupled pencil at frequency `k`.
    pub fn coupled(&self, k: f64, truncation: Truncation) -> Result<CoupledSystem> {
        assemble_coupled(self, k, truncation)
    }
}

/// `Ã x = μ B x` with `x = (u, φ)`: FEM unknowns first, then boundary unknowns.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    pub k: f64,
    pub truncation: Truncation,
    pub a: Csr<C64>,
    pub b: Csr<f64>,
    pub n_fem: usize,
    pub n_bem: usize,
    /// FEM dof of each pencil unknown in the volume block (the Dirichlet
    /// control drops the `Γ_tr` dofs).
    pub fem_dofs: Vec<usize>,
    /// `min|σ|/max|σ|` of the single-layer matrix (BEM backend only).
    pub rcond_s: Option<f64>,
    frobenius: f64,
}

impl CoupledSystem {
    pub fn dim(&self) -> usize {
        self.n_fem + self.n_bem
    }

    /// Volume part of a pencil vector, expanded to all FEM dofs.
    pub fn fem_part(&self, x: &[C64], ndof: usize) -> Vec<C64> {
        let mut u = vec![C64::new(0.0, 0.0); ndof];
        for (i, &d) in self.fem_dofs.iter().enumerate() {
            u[d] = x[i];
        }
        u
    }
}

impl Pencil for CoupledSystem {
    fn dim(&self) -> usize {
        CoupledSystem::dim(self)
    }
    fn apply_a(&self, x: &[C64], y: &mut [C64]) {
        self.a.matvec(x, y)
    }
    fn apply_b(&self, x: &[C64], y: &mut [C64]) {
        self.b.matvec(x, y)
    }
    fn a_frobenius(&self) -> f64 {
        self.frobenius
    }
}

/// Assembles the coupled pencil.
///
/// * BEM: `[[A_k, ½Mtrᵀ − D′],[Mtr, −S]]`, with `D′` acting from boundary
///   functions into the `Γ_tr` rows.
/// * Fourier: `[[A_k, −E],[T Eᵀ, −I]]`, where `T` is the Galerkin DtN built
///   from the exact mode symbol and `E` injects boundary rows into volume
///   rows. Same outer shape and `B`.
/// * Dirichlet control: `A_k` and `M` with the `Γ_tr` dofs removed.
///
/// `B = blockdiag(M, 0)` in every case.
pub fn assemble_coupled(disc: &Discretization, k: f64, truncation: Truncation) -> Result<CoupledSystem> {
    if !(k > 0.0) {
        return Err(Error::NonPositiveArgument { x: k });
    }
    let fem = &disc.fem;
    let n = fem.ndof();
    let a_k = linear_combination(1.0, &fem.k, -k * k, &fem.m)?;
    let m_b = disc.space.len();
    let gdofs = &fem.gamma_tr_dofs;

    let (a, b, n_fem, n_bem, fem_dofs, rcond_s) = match truncation {
        Truncation::Dirichlet => {
            let mut keep = vec![true; n];
            for &d in gdofs {
                keep[d] = false;
            }
            let fem_dofs: Vec<usize> = (0..n).filter(|&d| keep[d]).collect();
            let mut new_index = vec![usize::MAX; n];
            for (i, &d) in fem_dofs.iter().enumerate() {
                new_index[d] = i;
            }
            let nn = fem_dofs.len();
            let mut ta = Vec::with_capacity(a_k.nnz());
            a_k.for_each(|i, j, v| {
                if keep[i] && keep[j] {
                    ta.push((new_index[i], new_index[j], C64::new(v, 0.0)));
                }
            });
            let mut tb = Vec::with_capacity(fem.m.nnz());
            fem.m.for_each(|i, j, v| {
                if keep[i] && keep[j] {
                    tb.push((new_index[i], new_index[j], v));
                }
            });
            (Csr::from_triplets(nn, nn, &ta)?, Csr::from_triplets(nn, nn, &tb)?, nn, 0, fem_dofs, None)
        }
        Truncation::Dtn(backend) => {
            let dim = n + m_b;
            let mut ta: Vec<(usize, usize, C64)> = Vec::with_capacity(a_k.nnz() + 2 * m_b * m_b + 6 * m_b);
            a_k.for_each(|i, j, v| ta.push((i, j, C64::new(v, 0.0))));
            let rcond = match backend {
                DtnBackend::Bem => {
                    let ops = bem_operators(&disc.space, k)?;
                    disc.trace.for_each(|i, j, v| {
                        ta.push((n + i, j, C64::new(v, 0.0)));
                        ta.push((j, n + i, C64::new(0.5 * v, 0.0)));
                    });
                    for r in 0..m_b {
                        for c in 0..m_b {
                            ta.push((gdofs[r], n + c, -ops.dp.get(r, c)));
                            ta.push((n + r, n + c, -ops.s.get(r, c)));
                        }
                    }
                    Some(ops.rcond_s)
                }
                DtnBackend::Fourier => {
                    let t = fourier_dtn(&disc.space, k)?;
                    for r in 0..m_b {
                        ta.push((gdofs[r], n + r, C64::new(-1.0, 0.0)));
                        ta.push((n + r, n + r, C64::new(-1.0, 0.0)));
                        for c in 0..m_b {
                            ta.push((n + r, gdofs[c], t.galerkin.get(r, c)));
                        }
                    }
                    None
                }
            };
            let mut tb = Vec::with_capacity(fem.m.nnz());
            fem.m.for_each(|i, j, v| tb.push((i, j, v)));
            (Csr::from_triplets(dim, dim, &ta)?, Csr::from_triplets(dim, dim, &tb)?, n, m_b, (0..n).collect(), rcond)
        }
    };
    let frobenius = a.frobenius();
    Ok(CoupledSystem { k, truncation, a, b, n_fem, n_bem, fem_dofs, rcond_s, frobenius })
}

/// One computed eigenvalue with its volume eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenRecord {
    pub k: f64,
    pub mu: C64,
    /// `‖Ãx − μBx‖ / (‖Ã‖_F ‖x‖)`.
    pub residual: f64,
    /// FEM coefficients on all retained dofs, scaled so `u*Mu = 1`.
    pub u: Vec<C64>,
}

/// Eigensolver settings for [`spectrum_near_zero`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumOptions {
    pub nev: usize,
    pub ncv: Option<usize>,
    pub seed: u64,
}

impl SpectrumOptions {
    pub fn new(nev: usize) -> Self {
        SpectrumOptions { nev, ncv: None, seed: DEFAULT_SEED }
    }
}

/// Residual bound every returned eigenpair must meet.
pub const RESIDUAL_MAX: f64 = 1e-8;

/// The `nev` eigenvalues of smallest `|μ|` of an assembled pencil.
pub fn solve_near_zero<F: Factorizer>(
    disc: &Discretization,
    system: &CoupledSystem,
    opts: &SpectrumOptions,
    factorizer: &F,
) -> Result<Vec<EigenRecord>> {
    if opts.nev == 0 {
        return Err(Error::InvalidArgument("nev must be at least 1".into()));
    }
    let n_pencil = system.dim();
    let nev = opts.nev.min(system.n_fem.saturating_sub(1)).max(1);
    let factor = factorizer.factorize(&system.a)?;
    let mut kopts = KrylovOptions::new(nev);
    kopts.ncv = opts.ncv.map(|c| c.min(n_pencil));
    kopts.seed = opts.seed;
    let pairs = shift_invert(system, &factor, &kopts)?;
    let good: Vec<_> = pairs.into_iter().filter(|p| p.residual < RESIDUAL_MAX).collect();
    if good.len() < nev {
        return Err(Error::NoConvergence { converged: good.len(), requested: nev, iterations: kopts.max_restarts });
    }
    let m = &disc.fem.m;
    let ndof = disc.fem.ndof();
    let mut out = Vec::with_capacity(nev);
    for p in good.into_iter().take(nev) {
        let mut u = system.fem_part(&p.vector, ndof);
        let mut mu_vec = vec![C64::new(0.0, 0.0); ndof];
        m.matvec(&u, &mut mu_vec);
        let nrm: f64 = u.iter().zip(&mu_vec).map(|(a, b)| (a.conj() * b).re).sum::<f64>().sqrt();
        if !(nrm > 0.0) {
            return Err(Error::Singular { k: Some(system.k), detail: "eigenvector with zero volume part".into() });
        }
        // fix the phase so the largest entry is real and positive
        let big = u.iter().copied().fold(C64::new(0.0, 0.0), |acc, v| if v.norm() > acc.norm() { v } else { acc });
        let scale = big.conj() / (big.norm() * nrm);
        u.iter_mut().for_each(|v| *v *= scale);
        out.push(EigenRecord { k: system.k, mu: p.mu, residual: p.residual, u });
    }
    Ok(out)
}

/// The `nev` eigenvalues `μ` nearest the origin at frequency `k`, each with
/// residual below [`RESIDUAL_MAX`] and an `L²`-normalized eigenfunction.
pub fn spectrum_near_zero<F: Factorizer>(
    disc: &Discretization,
    k: f64,
    truncation: Truncation,
    opts: &SpectrumOptions,
    factorizer: &F,
) -> Result<Vec<EigenRecord>> {
    let system = assemble_coupled(disc, k, truncation)?;
    solve_near_zero(disc, &system, opts, factorizer)
}

/// Smallest `|μ|` of a spectrum.
pub fn min_abs_mu(records: &[EigenRecord]) -> Option<f64> {
    records.iter().map(|r| r.mu.norm()).reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CavitySpec;
    use crate::linalg::DenseLuFactorizer;

    fn small_disc() -> Discretization {
        let d = DomainSpec::disc(1.0);
        Discretization::build(&d, MeshPolicy::Uniform(0.35)).unwrap()
    }

    #[test]
    fn block_shape_and_b_rank() {
        let disc = small_disc();
        for tr in [Truncation::Dtn(DtnBackend::Bem), Truncation::Dtn(DtnBackend::Fourier)] {
            let s = assemble_coupled(&disc, 2.0, tr).unwrap();
            assert_eq!(s.dim(), disc.n_fem() + disc.space.len());
            let mut rows = vec![false; s.dim()];
            s.b.for_each(|i, _, v| rows[i] |= v != 0.0);
            assert_eq!(rows.iter().filter(|&&r| r).count(), disc.n_fem());
        }
        let s = assemble_coupled(&disc, 2.0, Truncation::Dirichlet).unwrap();
        assert_eq!(s.dim(), disc.n_fem() - disc.space.len());
    }

    #[test]
    fn dirichlet_control_is_real() {
        let disc = small_disc();
        let recs = spectrum_near_zero(&disc, 2.0, Truncation::Dirichlet, &SpectrumOptions::new(3), &DenseLuFactorizer)
            .unwrap();
        assert_eq!(recs.len(), 3);
        for r in &recs {
            assert!(r.mu.im.abs() < 1e-9, "{}", r.mu);
        }
    }

    #[test]
    fn graded_size_field() {
        let c = CavitySpec::large();
        let p = MeshPolicy::Graded { cavity: 0.01, outer: 0.05, grading: 0.3 };
        assert_eq!(p.size_at(Some(&c), [0.0, 0.0]), 0.01);
        assert_eq!(p.size_at(Some(&c), [1.9, 0.0]), 0.05);
        let mid = p.size_at(Some(&c), [1.2, 0.0]);
        assert!(mid > 0.01 && mid < 0.05);
    }
}
