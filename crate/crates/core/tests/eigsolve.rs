use nalgebra::DMatrix;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use trapmode_core::linalg::{shift_invert, DMat, DenseLu, DensePencil, KrylovOptions};
use trapmode_core::C64;

fn rng_matrix(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> DMat {
    let mut u = || (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
    DMat::from_fn(n, n, |_, _| C64::new(u(), u()))
}

fn to_na(m: &DMat) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows, m.cols, |i, j| m[(i, j)])
}

/// Eigenvalues of `B⁻¹A` from nalgebra's LU and Schur, sorted by modulus.
fn oracle(a: &DMat, b: &DMat) -> Vec<C64> {
    let binv_a = to_na(b).lu().solve(&to_na(a)).unwrap();
    let mut ev: Vec<C64> = binv_a.schur().eigenvalues().unwrap().iter().copied().collect();
    ev.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
    ev
}

#[test]
fn random_pencils_match_dense_oracle() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..100 {
        let a = rng_matrix(&mut rng, 30);
        let mut b = rng_matrix(&mut rng, 30);
        for i in 0..30 {
            b[(i, i)] += C64::new(3.0, 0.0);
        }
        let expect = oracle(&a, &b);
        let p = DensePencil { a: a.clone(), b };
        let lu = DenseLu::factor(&a).unwrap();
        let got = shift_invert(&p, &lu, &KrylovOptions::new(5)).unwrap();
        assert_eq!(got.len(), 5);
        for (g, e) in got.iter().zip(&expect) {
            assert!((g.mu - e).norm() < 1e-8 * e.norm().max(1.0), "trial {trial}: {} vs {e}", g.mu);
            assert!(g.residual < 1e-8 && g.converged);
        }
    }
}

#[test]
fn singular_mass_block_gives_no_infinite_eigenvalues() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let a = rng_matrix(&mut rng, 4);
    let b = DMat::from_fn(4, 4, |i, j| C64::new(if i == j && i < 2 { 1.0 } else { 0.0 }, 0.0));
    // finite spectrum = eigenvalues of the Schur complement A11 − A12 A22⁻¹ A21
    let na = to_na(&a);
    let a22inv = na.view((2, 2), (2, 2)).into_owned().try_inverse().unwrap();
    let sc = na.view((0, 0), (2, 2)) - na.view((0, 2), (2, 2)) * a22inv * na.view((2, 0), (2, 2));
    let mut expect: Vec<C64> = sc.schur().eigenvalues().unwrap().iter().copied().collect();
    expect.sort_by(|x, y| x.norm().partial_cmp(&y.norm()).unwrap());
    let p = DensePencil { a: a.clone(), b };
    let got = shift_invert(&p, &DenseLu::factor(&a).unwrap(), &KrylovOptions::new(3)).unwrap();
    assert_eq!(got.len(), 2, "{:?}", got.iter().map(|g| g.mu).collect::<Vec<_>>());
    for (g, e) in got.iter().zip(&expect) {
        assert!((g.mu - e).norm() < 1e-10);
    }
}

#[test]
fn rayleigh_quotient_reproduces_eigenvalue() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let a = rng_matrix(&mut rng, 60);
    let b = DMat::identity(60);
    let p = DensePencil { a: a.clone(), b };
    let got = shift_invert(&p, &DenseLu::factor(&a).unwrap(), &KrylovOptions::new(6)).unwrap();
    for g in &got {
        let mut au = vec![C64::new(0.0, 0.0); 60];
        a.matvec(&g.vector, &mut au);
        let num: C64 = g.vector.iter().zip(&au).map(|(u, v)| u.conj() * v).sum();
        let den: f64 = g.vector.iter().map(|u| u.norm_sqr()).sum();
        assert!((num / den - g.mu).norm() < 1e-8 * g.mu.norm().max(1.0));
    }
}
