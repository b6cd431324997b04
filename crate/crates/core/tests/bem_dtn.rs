// reference values carry all 20 digits of the high-precision source
#![allow(clippy::excessive_precision)]

use std::f64::consts::{PI, TAU};

use trapmode_core::bem::{
    assemble_adjoint_double_layer, assemble_single_layer, bem_operators, dtn_apply, fourier_dtn, fourier_dtn_symbol,
    DtnBackend,
};
use trapmode_core::fem::CircleSpace;
use trapmode_core::specfun::{bessel_jy, hankel01};
use trapmode_core::{Error, C64};

/// `k H_n′(kR)/H_n(kR)` at k = 5, R = 2 from 30-digit arithmetic.
const D_REF: &[(i64, f64, f64)] = &[
    (0, -0.24939389479543463293, 5.0061570936815180755),
    (1, -0.25183507905461242348, 4.9814875396717509394),
    (5, -0.32723858589719097297, 4.3533257456076432959),
    (10, -1.1665540312866363802, 1.8450959843000394168),
    (40, -19.347768666807941464, 0.0),
];

fn space(m: usize, r: f64) -> CircleSpace {
    CircleSpace::uniform([0.0, 0.0], r, m)
}

fn max_rel(a: &[C64], b: &[C64]) -> f64 {
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

#[test]
fn symbol_matches_reference_table() {
    for &(n, re, im) in D_REF {
        let d = fourier_dtn_symbol(n, 5.0, 2.0).unwrap();
        let e = C64::new(re, im);
        assert!((d - e).norm() < 1e-12 * e.norm(), "n = {n}: {d}");
        assert_eq!(d, fourier_dtn_symbol(-n, 5.0, 2.0).unwrap());
    }
}

#[test]
fn symbol_radiates_and_becomes_evanescent() {
    let d0 = fourier_dtn_symbol(0, 2.5, 2.0).unwrap();
    assert!(d0.im > 0.0);
    for n in 0..60 {
        assert!(fourier_dtn_symbol(n, 2.5, 2.0).unwrap().im >= 0.0);
    }
    let n = 4 * 5;
    let d = fourier_dtn_symbol(n, 2.5, 2.0).unwrap();
    let lim = -(n as f64) / 2.0;
    assert!((d.re - lim).abs() < 0.05 * lim.abs());
}

#[test]
fn single_layer_is_complex_symmetric() {
    let s = assemble_single_layer(&space(40, 1.5), 7.3).unwrap().to_dense();
    for i in 0..40 {
        for j in 0..40 {
            assert!((s[(i, j)] - s[(j, i)]).norm() < 1e-14);
        }
    }
    // rotational invariance: entries depend only on the node separation
    assert!((s[(3, 7)] - s[(20, 24)]).norm() < 1e-15);
}

#[test]
fn constant_mode_has_no_aliasing() {
    // the constant vector is an exact eigenvector, and hat-function aliases of
    // mode 0 vanish, so the discrete eigenvalue is RΔ times the exact symbol
    let (k, r, m) = (5.0, 2.0, 64);
    let sp = space(m, r);
    let jy = bessel_jy(0, k * r).unwrap();
    let rd = r * TAU / m as f64;
    let s0 = C64::new(0.0, PI * r / 2.0) * jy.j * jy.hankel();
    let sig = assemble_single_layer(&sp, k).unwrap().symbol()[0];
    assert!((sig - s0 * rd).norm() < 1e-12 * sig.norm(), "{sig} vs {}", s0 * rd);
    let kp0 = C64::new(0.0, PI * k * r / 2.0) * jy.j * jy.hankel_prime() + 0.5;
    let del = assemble_adjoint_double_layer(&sp, k).unwrap().symbol()[0];
    assert!((del - kp0 * rd).norm() < 1e-12 * del.norm(), "{del} vs {}", kp0 * rd);
}

#[test]
fn laplace_limit_of_single_layer() {
    // at small k the non-constant modes see only −(1/2π) log r, whose symbol
    // on the circle is R/(2|n|); the P1 space weights alias n by sinc⁴(nΔ/2)
    let (r, m) = (1.3, 256);
    let sig = assemble_single_layer(&space(m, r), 1e-4).unwrap().symbol();
    let delta = TAU / m as f64;
    let rd = r * delta;
    for p in 1..6i64 {
        let expect: f64 = (-400..=400i64)
            .map(|q| {
                let n = (p + q * m as i64) as f64;
                let x = 0.5 * n * delta;
                rd * r / (2.0 * n.abs()) * (x.sin() / x).powi(4)
            })
            .sum();
        assert!((sig[p as usize] - expect).norm() < 1e-6 * expect, "mode {p}: {}", sig[p as usize] / rd);
    }
}

#[test]
fn outgoing_h0_trace() {
    let (k, r) = (2.5, 2.0);
    let (h0, h1) = hankel01(k * r).unwrap();
    let expect = -h1 * k;
    let sp = space(512, r);
    for backend in [DtnBackend::Bem, DtnBackend::Fourier] {
        let out = dtn_apply(&sp, k, &vec![h0; 512], backend).unwrap();
        for v in out {
            assert!((v - expect).norm() < 1e-6, "{backend:?}: {v} vs {expect}");
        }
    }
}

#[test]
fn fourier_modes_through_bem() {
    let (k, r, m) = (5.0, 2.0, 512);
    let sp = space(m, r);
    for n in 0..=10i64 {
        let g: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, n as f64 * sp.angle(j))).collect();
        let d = fourier_dtn_symbol(n, k, r).unwrap();
        let out = dtn_apply(&sp, k, &g, DtnBackend::Bem).unwrap();
        let want: Vec<C64> = g.iter().map(|v| v * d).collect();
        assert!(max_rel(&out, &want) < 1e-5, "mode {n}: {}", max_rel(&out, &want));
    }
}

#[test]
fn zero_trace_gives_zero() {
    let sp = space(32, 1.0);
    for backend in [DtnBackend::Bem, DtnBackend::Fourier] {
        let out = dtn_apply(&sp, 3.0, &[C64::new(0.0, 0.0); 32], backend).unwrap();
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }
}

#[test]
fn sign_property_on_every_mode() {
    for (k, r, m) in [(2.5, 1.5, 64), (9.2, 2.0, 200), (12.5, 1.5, 150)] {
        let sp = space(m, r);
        let bem = bem_operators(&sp, k).unwrap();
        let four = fourier_dtn(&sp, k).unwrap();
        let mass = bem.s.symbol().len();
        assert_eq!(mass, m);
        // Im⟨DtN g, g⟩ = Σ |ĝ_p|² Im(m_p λ_p) with m_p > 0
        for lam in [bem.dtn_symbol(), four.dtn_symbol()] {
            let scale = lam.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (p, l) in lam.iter().enumerate() {
                assert!(l.im >= -1e-10 * scale, "k = {k}, mode {p}: {l}");
            }
        }
    }
}

#[test]
fn backends_agree_better_under_refinement() {
    let (k, r): (f64, f64) = (5.0, 2.0);
    let modes = 2 * (k * r).ceil() as usize;
    let mut errs = Vec::new();
    for m in [64, 128, 256] {
        let sp = space(m, r);
        let a = bem_operators(&sp, k).unwrap().dtn_symbol();
        let b = fourier_dtn(&sp, k).unwrap().dtn_symbol();
        let e = (0..=modes).map(|p| (a[p] - b[p]).norm() / b[p].norm()).fold(0.0, f64::max);
        errs.push(e);
    }
    // the two discretizations differ only through hat-function aliasing,
    // which falls off at least quadratically in the panel size
    assert!(errs[0] > 4.0 * errs[1] && errs[1] > 4.0 * errs[2], "{errs:?}");
}

#[test]
fn interior_resonance_is_reported() {
    // J_0(kR) = 0 makes the constant mode of S vanish
    let j01 = 2.404_825_557_695_772_8;
    let r = 1.5;
    let err = bem_operators(&space(64, r), j01 / r).unwrap_err();
    assert!(matches!(err, Error::SingularSingleLayer { .. }), "{err}");
    assert!(bem_operators(&space(64, r), j01 / r + 0.05).is_ok());
}

#[test]
fn fourier_apply_is_the_exact_symbol() {
    let (k, r, m) = (5.0, 2.0, 128);
    let sp = space(m, r);
    for n in [-20i64, -3, 0, 7, 64] {
        let g: Vec<C64> = (0..m).map(|j| C64::from_polar(1.0, n as f64 * sp.angle(j))).collect();
        let d = fourier_dtn_symbol(n, k, r).unwrap();
        let out = dtn_apply(&sp, k, &g, DtnBackend::Fourier).unwrap();
        let want: Vec<C64> = g.iter().map(|v| v * d).collect();
        assert!(max_rel(&out, &want) < 1e-12, "mode {n}: {}", max_rel(&out, &want));
    }
}
