//! End-to-end acceptance run. Prints one `PASS`/`FAIL` line per criterion
//! and exits non-zero if any fails. Takes tens of minutes on one core; the
//! sweep uses every available core.

use std::time::Instant;

use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use trapmode::runner::{spectrum, sweep_parallel};
use trapmode::SparseLuFactorizer;
use trapmode_core::bem::{dtn_apply, fourier_dtn_symbol, DtnBackend};
use trapmode_core::ellipse::{ellipse_mode_frequency, fem_ellipse_oracle, richardson, EllipseMode};
use trapmode_core::fem::CircleSpace;
use trapmode_core::geometry::{CavitySpec, DomainSpec};
use trapmode_core::lab::{
    box_count, min_abs_mu, quasimode_quality, theorem1_check, BoxSpec, CutoffSpec, Discretization, MeshPolicy,
    SpectrumOptions, TheoremOutcome, Truncation,
};
use trapmode_core::linalg::{shift_invert, DMat, DenseLu, DensePencil, KrylovOptions};
use trapmode_core::specfun::{hankel01, Parity};
use trapmode_core::C64;

const BEM: Truncation = Truncation::Dtn(DtnBackend::Bem);

/// Published frequencies of the ellipse a1 = 1, a2 = 0.5.
const PUBLISHED: [(&str, u32, u32, Parity, f64); 4] = [
    ("o:0:3", 0, 3, Parity::Odd, 9.17017539835808),
    ("e:1:0", 1, 0, Parity::Even, 9.977120156613617),
    ("e:3:0", 3, 0, Parity::Even, 22.526496854613104),
    ("o:2:4", 2, 4, Parity::Odd, 22.6811692253925),
];

/// Detuning for the contrast runs and the required ratio.
const DETUNE: f64 = 0.3;
const CONTRAST: f64 = 0.1;

fn mode(i: usize) -> EllipseMode {
    let (_, m, n, p, _) = PUBLISHED[i];
    ellipse_mode_frequency(m, n, p, 1.0, 0.5).unwrap()
}

struct Report {
    results: Vec<(String, bool)>,
    /// Every eigenvalue computed by the spectral runs, for the sign check.
    mus: Vec<C64>,
}

impl Report {
    fn record(&mut self, name: &str, pass: bool, detail: String, started: Instant) {
        println!("{} {name}: {detail} ({:.0?})", if pass { "PASS" } else { "FAIL" }, started.elapsed());
        self.results.push((name.into(), pass));
    }
}

fn ellipse_frequencies(rep: &mut Report) {
    let t = Instant::now();
    let mut worst_mathieu: f64 = 0.0;
    let mut worst_fem: f64 = 0.0;
    for (i, &(_, _, _, _, k)) in PUBLISHED.iter().enumerate() {
        let m = mode(i);
        worst_mathieu = worst_mathieu.max((m.k - k).abs() / k);
        let coarse = fem_ellipse_oracle(&m, 0.02, &SparseLuFactorizer).unwrap();
        let fine = fem_ellipse_oracle(&m, 0.01, &SparseLuFactorizer).unwrap();
        worst_fem = worst_fem.max((richardson(&coarse, &fine) - k).abs() / k);
    }
    let pass = worst_mathieu <= 1e-9 && worst_fem <= 5e-3;
    rep.record(
        "ellipse mode frequencies",
        pass,
        format!("max rel. error Mathieu {worst_mathieu:.1e} (≤ 1e-9), FEM h = 0.01 + Richardson {worst_fem:.1e} (≤ 5e-3)"),
        t,
    );
}

fn dtn_oracle(rep: &mut Report) {
    let t = Instant::now();
    let (k, r, m) = (5.0, 2.0, 512);
    let sp = CircleSpace::uniform([0.0, 0.0], r, m);
    let (h0, h1) = hankel01(k * r).unwrap();
    let expect = -h1 * k;
    let out = dtn_apply(&sp, k, &vec![h0; m], DtnBackend::Bem).unwrap();
    let trace_err = out.iter().map(|v| (v - expect).norm() / expect.norm()).fold(0.0, f64::max);
    let mut mode_err: f64 = 0.0;
    for n in -10..=10i64 {
        let g: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, n as f64 * sp.angle(j))).collect();
        let d = fourier_dtn_symbol(n, k, r).unwrap();
        let bem = dtn_apply(&sp, k, &g, DtnBackend::Bem).unwrap();
        let fou = dtn_apply(&sp, k, &g, DtnBackend::Fourier).unwrap();
        for ((b, f), gj) in bem.iter().zip(&fou).zip(&g) {
            mode_err = mode_err.max((b - f).norm() / (d * gj).norm());
        }
    }
    let pass = trace_err <= 1e-5 && mode_err <= 1e-5;
    rep.record(
        "DtN oracle",
        pass,
        format!("outgoing H0 trace max rel. error {trace_err:.1e}, bem vs fourier on |n| ≤ 10 {mode_err:.1e} (both ≤ 1e-5)"),
        t,
    );
}

fn near_zero_contrast(rep: &mut Report) {
    let t = Instant::now();
    let opts = SpectrumOptions::new(4);
    let mut lines = Vec::new();
    let mut pass = true;
    for cavity in [CavitySpec::large(), CavitySpec::small()] {
        let name = cavity.kind.name();
        for (i, &(label, ..)) in PUBLISHED.iter().enumerate() {
            let k = mode(i).k;
            // one mesh per mode, sized for the detuned (higher) frequency
            let policy = MeshPolicy::desk(k + DETUNE).unwrap();
            let disc = Discretization::build(&DomainSpec::cavity(cavity, 2.0).unwrap(), policy).unwrap();
            let mut at = |k: f64| {
                let recs = spectrum(&disc, k, BEM, &opts).unwrap();
                rep.mus.extend(recs.iter().map(|r| r.mu));
                min_abs_mu(&recs).unwrap()
            };
            let (on, off) = (at(k), at(k + DETUNE));
            let ratio = on / off;
            let expect_contrast = name == "large" || label.starts_with('e');
            let ok = (ratio <= CONTRAST) == expect_contrast;
            pass &= ok;
            lines.push(format!(
                "{name} {label}: |μ_min| {on:.3e} vs {off:.3e} at k+{DETUNE}, ratio {ratio:.3} ({}, h_cavity {:.4}){}",
                if expect_contrast { "contrast expected" } else { "no contrast expected" },
                policy.h_min(),
                if ok { "" } else { " ✗" }
            ));
        }
    }
    rep.record("near-zero eigenvalue contrast", pass, format!("ratio ≤ {CONTRAST} means contrast"), t);
    for l in lines {
        println!("    {l}");
    }
}

fn sweep_box_count(rep: &mut Report) {
    let t = Instant::now();
    let (kmin, kmax, step) = (8.5, 10.5, 0.025);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let bx = BoxSpec::new(0.2, 0.05, kmin, kmax).unwrap();
    let mut counts = Vec::new();
    for cavity in [CavitySpec::large(), CavitySpec::small()] {
        let policy = MeshPolicy::desk(kmax).unwrap();
        let disc = Discretization::build(&DomainSpec::cavity(cavity, 1.5).unwrap(), policy).unwrap();
        let traj = sweep_parallel(&disc, kmin, kmax, step, BEM, &SpectrumOptions::new(4), jobs, &|_, _| {}).unwrap();
        for tr in &traj.tracks {
            rep.mus.extend(tr.points.iter().map(|p| p.mu));
        }
        counts.push((cavity.kind.name(), box_count(&traj, &bx), traj.k_grid.len(), traj.missing.len()));
    }
    let pass = counts[0].1 > counts[1].1;
    let detail = counts
        .iter()
        .map(|(n, c, s, miss)| format!("{n} {c} ({s} solves, {miss} missing)"))
        .collect::<Vec<_>>()
        .join(", ");
    rep.record("sweep box count, k ∈ (8.5, 10.5), R = 1.5", pass, format!("{detail}; large must exceed small"), t);
}

fn quasimode_trend(rep: &mut Report) {
    let t = Instant::now();
    let cavity = CavitySpec::large();
    let cut = CutoffSpec::for_cavity(&cavity).unwrap();
    let pts: Vec<(f64, f64)> = (1..=3)
        .map(|m| {
            let md = ellipse_mode_frequency(m, 0, Parity::Even, 1.0, 0.5).unwrap();
            (md.k, quasimode_quality(&md, &cavity, &cut).unwrap().eps)
        })
        .collect();
    let decreasing = pts.windows(2).all(|w| w[1].1 < w[0].1);
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1.ln() - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    let eps: Vec<String> = pts.iter().map(|p| format!("{:.4}", p.1)).collect();
    rep.record(
        "quasimode exponential trend",
        decreasing && r2 > 0.9,
        format!("ε(e:1:0, e:2:0, e:3:0) = [{}], slope {:.3}, r² {r2:.4} (> 0.9)", eps.join(", "), sxy / sxx),
        t,
    );
}

fn pencil_oracle(rep: &mut Report) {
    let t = Instant::now();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xACCE);
    let mut u = move || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..100 {
        let a = DMat::from_fn(30, 30, |_, _| C64::new(u(), u()));
        let b = DMat::from_fn(30, 30, |i, j| C64::new(u() + if i == j { 3.0 } else { 0.0 }, u()));
        let na = DMatrix::from_fn(30, 30, |i, j| a[(i, j)]);
        let nb = DMatrix::from_fn(30, 30, |i, j| b[(i, j)]);
        let mut expect: Vec<C64> = nb.lu().solve(&na).unwrap().schur().eigenvalues().unwrap().iter().copied().collect();
        expect.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
        let lu = DenseLu::factor(&a).unwrap();
        let got = shift_invert(&DensePencil { a, b }, &lu, &KrylovOptions::new(5)).unwrap();
        if got.len() != 5 {
            failures += 1;
            continue;
        }
        for (g, e) in got.iter().zip(&expect) {
            worst = worst.max((g.mu - e).norm() / e.norm().max(1.0));
        }
    }
    rep.record(
        "pencil solver oracle",
        failures == 0 && worst <= 1e-8,
        format!("100 random 30×30 pencils, 5 nearest eigenvalues, max deviation {worst:.1e} (≤ 1e-8)"),
        t,
    );
}

fn theorem_check(rep: &mut Report) {
    let t = Instant::now();
    let cavity = CavitySpec::large();
    let m = mode(1);
    let policy = MeshPolicy::desk(m.k).unwrap();
    let disc = Discretization::build(&DomainSpec::cavity(cavity, 2.0).unwrap(), policy).unwrap();
    let cut = CutoffSpec::for_cavity(&cavity).unwrap();
    let c = theorem1_check(&disc, &cavity, &m, m.k, 4.6, &cut, BEM, &SpectrumOptions::new(4), policy.h_min(), &SparseLuFactorizer)
        .unwrap();
    let (mu, bound, budget) = (c.mu_min.unwrap(), c.bound.unwrap(), c.budget.unwrap());
    rep.record(
        "single-frequency bound at e:1:0, α = 4.6",
        c.outcome == TheoremOutcome::Pass,
        format!("|μ_min| {mu:.3e} ≤ k^α ε {bound:.3e} + budget {budget:.3e}, ε {:.4}", c.eps.unwrap()),
        t,
    );
}

fn main() {
    let mut rep = Report { results: Vec::new(), mus: Vec::new() };
    ellipse_frequencies(&mut rep);
    dtn_oracle(&mut rep);
    pencil_oracle(&mut rep);
    quasimode_trend(&mut rep);
    near_zero_contrast(&mut rep);
    theorem_check(&mut rep);
    sweep_box_count(&mut rep);
    let t = Instant::now();
    let worst = rep.mus.iter().map(|m| m.im).fold(f64::NEG_INFINITY, f64::max);
    rep.record("sign invariant", worst <= 1e-6, format!("max Im μ over {} eigenvalues {worst:.2e} (≤ 1e-6)", rep.mus.len()), t);
    let failed: Vec<_> = rep.results.iter().filter(|r| !r.1).map(|r| r.0.as_str()).collect();
    println!("acceptance: {} of {} criteria pass", rep.results.len() - failed.len(), rep.results.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
