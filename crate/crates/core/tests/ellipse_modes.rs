use trapmode_core::ellipse::{
    ellipse_mode_field, ellipse_mode_frequency, fem_dirichlet_eigenpairs, fem_ellipse_oracle, richardson,
};
use trapmode_core::geometry::{BoundaryCurveSet, BoundaryTag};
use trapmode_core::linalg::DenseLuFactorizer;
use trapmode_core::specfun::Parity;
use trapmode_core::Error;

/// Published frequencies of the ellipse a1 = 1, a2 = 0.5.
const PUBLISHED: &[(u32, u32, Parity, f64)] = &[
    (0, 3, Parity::Odd, 9.17017539835808),
    (1, 0, Parity::Even, 9.977120156613617),
    (3, 0, Parity::Even, 22.526496854613104),
    (2, 4, Parity::Odd, 22.6811692253925),
];

#[test]
fn published_frequencies() {
    for &(m, n, p, k) in PUBLISHED {
        let mode = ellipse_mode_frequency(m, n, p, 1.0, 0.5).unwrap();
        assert!((mode.k - k).abs() < 1e-9 * k, "{}: {} vs {k}", mode.label(), mode.k);
        assert!((mode.xi0 - 0.5f64.atanh()).abs() < 1e-15);
        assert!((mode.k - 2.0 * mode.q.sqrt() / mode.focal).abs() < 1e-12 * mode.k);
        // Dirichlet condition on the boundary
        let (r, ..) = mode.factors(mode.xi0, 0.3).unwrap();
        assert!(r.abs() < 1e-10);
    }
}

#[test]
fn frequencies_increase_with_radial_index() {
    let ks: Vec<f64> = (0..4).map(|m| ellipse_mode_frequency(m, 0, Parity::Even, 1.0, 0.5).unwrap().k).collect();
    assert!(ks.windows(2).all(|w| w[0] < w[1]), "{ks:?}");
}

#[test]
fn angular_zero_count_matches_label() {
    for &(m, n, p, _) in PUBLISHED {
        let mode = ellipse_mode_frequency(m, n, p, 1.0, 0.5).unwrap();
        let samples = 4000;
        let mut zeros = 0;
        let mut prev = mode.factors(0.3, 0.0).unwrap().2;
        if prev == 0.0 {
            zeros += 1;
        }
        for i in 1..samples {
            let t = mode.factors(0.3, std::f64::consts::PI * i as f64 / samples as f64).unwrap().2;
            if t != 0.0 && prev != 0.0 && (t > 0.0) != (prev > 0.0) {
                zeros += 1;
            }
            if t != 0.0 {
                prev = t;
            }
        }
        assert_eq!(zeros, n, "{}", mode.label());
    }
}

#[test]
fn field_shape() {
    let odd = ellipse_mode_frequency(0, 3, Parity::Odd, 1.0, 0.5).unwrap();
    assert!(ellipse_mode_field(&odd, [0.3, 0.0]).unwrap().abs() < 1e-12);
    assert!(ellipse_mode_field(&odd, [0.95, 0.0]).unwrap().abs() < 1e-12);
    let e = ellipse_mode_frequency(1, 0, Parity::Even, 1.0, 0.5).unwrap();
    let centre = ellipse_mode_field(&e, [0.0, 0.25]).unwrap().abs();
    let side = ellipse_mode_field(&e, [0.9, 0.0]).unwrap().abs();
    assert!(centre > 5.0 * side, "{centre} vs {side}");
    let t = 1.234f64;
    assert!(ellipse_mode_field(&e, [t.cos(), 0.5 * t.sin()]).unwrap().abs() < 1e-8);
    assert!(matches!(ellipse_mode_field(&e, [1.01, 0.0]), Err(Error::OutsideDomain { .. })));
}

#[test]
fn normalization_is_unit() {
    let e = ellipse_mode_frequency(0, 2, Parity::Even, 1.0, 0.5).unwrap();
    // independent check on a finer grid
    let n = 1000;
    let (hx, hy) = (2.0 / n as f64, 1.0 / n as f64);
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            let p = [-1.0 + (i as f64 + 0.5) * hx, -0.5 + (j as f64 + 0.5) * hy];
            if e.contains(p) {
                s += ellipse_mode_field(&e, p).unwrap().powi(2);
            }
        }
    }
    assert!((s * hx * hy - 1.0).abs() < 5e-3);
}

#[test]
fn disc_lowest_eigenvalue() {
    let j01 = 2.404825557695773;
    let disc = BoundaryCurveSet::circle([0.0, 0.0], 1.0, BoundaryTag::GammaD);
    let (_, _, pairs) = fem_dirichlet_eigenpairs(disc, 0.06, 5.0, 2, &DenseLuFactorizer).unwrap();
    let k = pairs[0].0.sqrt();
    assert!((k - j01).abs() < 2e-3 * j01, "{k}");
    assert!(k > j01);
}

#[test]
fn fem_oracle_agrees_and_converges() {
    let mode = ellipse_mode_frequency(0, 0, Parity::Even, 1.0, 0.5).unwrap();
    let coarse = fem_ellipse_oracle(&mode, 0.1, &DenseLuFactorizer).unwrap();
    let fine = fem_ellipse_oracle(&mode, 0.05, &DenseLuFactorizer).unwrap();
    let (e1, e2) = (coarse.k - mode.k, fine.k - mode.k);
    // P1 eigenvalues converge from above at second order
    assert!(e1 > 0.0 && e2 > 0.0);
    let ratio = e1 / e2;
    assert!((3.0..5.5).contains(&ratio), "ratio {ratio}");
    let extrap = richardson(&coarse, &fine);
    assert!((extrap - mode.k).abs() < 0.2 * e2, "{extrap} vs {}", mode.k);
    assert!(fine.overlap > 0.99);
}
