//! Bessel functions `J_n`, `Y_n` of integer order and real positive argument.
//!
//! `J_n` comes from Miller's backward recurrence normalized by
//! `J_0 + 2 Σ J_{2k} = 1`. Below [`ASYMPTOTIC_CROSSOVER`], `Y_0` and `Y_1` use
//! the Neumann series in the same `J` sequence; above it, the Hankel
//! asymptotic expansion. Higher `Y_n` follow by forward recurrence, which is
//! stable for the dominant solution.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Largest order accepted by [`bessel_jy`].
pub const MAX_ORDER: u32 = 200;

/// Argument above which `J_0, J_1, Y_0, Y_1` switch to the Hankel expansion.
///
/// At x = 20 the smallest asymptotic term is ~e^{-40}; at 12 it is only
/// ~1e-11, which misses the 1e-12 absolute target.
pub const ASYMPTOTIC_CROSSOVER: f64 = 20.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_ABOVE: f64 = 1e250;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselJY {
    pub j: f64,
    pub y: f64,
    pub jp: f64,
    pub yp: f64,
}

impl BesselJY {
    /// `H_n^{(1)} = J_n + i Y_n`.
    pub fn hankel(&self) -> C64 {
        C64::new(self.j, self.y)
    }

    pub fn hankel_prime(&self) -> C64 {
        C64::new(self.jp, self.yp)
    }
}

/// `J_n(x)`, `Y_n(x)` and their derivatives.
pub fn bessel_jy(n: u32, x: f64) -> Result<BesselJY> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument { x });
    }
    if n > MAX_ORDER {
        return Err(Error::OrderOutOfRange { n, max: MAX_ORDER });
    }
    let n = n as usize;
    let mut js = Vec::new();
    bessel_j_sequence(n + 1, x, &mut js);
    let (y0, y1) = if x < ASYMPTOTIC_CROSSOVER {
        neumann_y01(x, &js)
    } else {
        let [_, _, y0, y1] = asymptotic01(x);
        (y0, y1)
    };
    let mut ys = Vec::with_capacity(n + 2);
    ys.push(y0);
    ys.push(y1);
    for k in 1..=n {
        let next = (2.0 * k as f64 / x) * ys[k] - ys[k - 1];
        ys.push(next);
    }
    let (jp, yp) = if n == 0 {
        (-js[1], -ys[1])
    } else {
        let nf = n as f64;
        (js[n - 1] - nf / x * js[n], ys[n - 1] - nf / x * ys[n])
    };
    Ok(BesselJY {
        j: js[n],
        y: ys[n],
        jp,
        yp,
    })
}

/// Fills `out` with `J_0(x), …, J_nmax(x)` for `x ≥ 0`.
///
/// The returned vector may be longer than `nmax + 1`; trailing entries are the
/// (accurate, tiny) higher orders used by the recurrence.
pub fn bessel_j_sequence(nmax: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    if x == 0.0 {
        out.resize(nmax + 1, 0.0);
        out[0] = 1.0;
        return;
    }
    if x < 1e-6 {
        // two-term power series is exact to double precision here
        let h = 0.5 * x;
        let mut lead = 1.0;
        for k in 0..=nmax {
            if k > 0 {
                lead *= h / k as f64;
            }
            out.push(lead * (1.0 - h * h / (k as f64 + 1.0)));
        }
        return;
    }
    let n0 = nmax.max(x.ceil() as usize);
    let mut start = n0 + 12 + (160.0 * n0 as f64).sqrt() as usize;
    start += start % 2;
    out.resize(start + 1, 0.0);
    let mut next = 0.0;
    let mut cur = 1e-300;
    let mut norm = 0.0;
    out[start] = cur;
    for k in (1..=start).rev() {
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        out[k - 1] = cur;
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            for v in out[k - 1..].iter_mut() {
                *v *= s;
            }
            cur *= s;
            next *= s;
            norm *= s;
        }
    }
    norm += out[0];
    let inv = 1.0 / norm;
    for v in out.iter_mut() {
        *v *= inv;
    }
}

/// Neumann-series `Y_0`, `Y_1` from a Miller `J` sequence.
fn neumann_y01(x: f64, js: &[f64]) -> (f64, f64) {
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k + 1 < js.len() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s0 += sign * js[2 * k] / kf;
        s1 += sign * (js[2 * k - 1] - js[2 * k + 1]) / kf;
        k += 1;
    }
    let y0 = (2.0 / PI) * (lg * js[0] - 2.0 * s0);
    let y1 = -(2.0 / PI) * (js[0] / x - lg * js[1] - s1);
    (y0, y1)
}

/// Hankel asymptotic expansion for orders 0 and 1; returns `[J0, J1, Y0, Y1]`.
fn asymptotic01(x: f64) -> [f64; 4] {
    let pq = |mu: f64| -> (f64, f64) {
        // a_k = prod_{j=1..k} (mu - (2j-1)^2) / (k! 8^k x^k)
        let mut p = 1.0;
        let mut q = 0.0;
        let mut term = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..200 {
            let kk = (2 * k - 1) as f64;
            term *= (mu - kk * kk) / (k as f64 * 8.0 * x);
            let mag = term.abs();
            if mag > last || mag < 1e-18 {
                break;
            }
            last = mag;
            match k % 4 {
                1 => q += term,
                2 => p -= term,
                3 => q -= term,
                _ => p += term,
            }
        }
        (p, q)
    };
    let amp = (2.0 / (PI * x)).sqrt();
    let (p0, q0) = pq(0.0);
    let (p1, q1) = pq(4.0);
    let (s0, c0) = (x - FRAC_PI_4).sin_cos();
    // chi_1 = x - 3π/4 = chi_0 - π/2
    let (s1, c1) = (-c0, s0);
    [
        amp * (p0 * c0 - q0 * s0),
        amp * (p1 * c1 - q1 * s1),
        amp * (p0 * s0 + q0 * c0),
        amp * (p1 * s1 + q1 * c1),
    ]
}

/// `Y_0(x)` and `Y_1(x)`.
pub fn bessel_y01(x: f64) -> Result<(f64, f64)> {
    let [_, _, y0, y1] = hankel01_parts(x)?;
    Ok((y0, y1))
}

fn hankel01_parts(x: f64) -> Result<[f64; 4]> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositiveArgument { x });
    }
    if x >= ASYMPTOTIC_CROSSOVER {
        return Ok(asymptotic01(x));
    }
    let mut js = Vec::new();
    bessel_j_sequence(1, x, &mut js);
    let (y0, y1) = neumann_y01(x, &js);
    Ok([js[0], js[1], y0, y1])
}

/// `(H_0^{(1)}(x), H_1^{(1)}(x))`, the boundary-integral kernel workhorse.
pub fn hankel01(x: f64) -> Result<(C64, C64)> {
    let [j0, j1, y0, y1] = hankel01_parts(x)?;
    Ok((C64::new(j0, y0), C64::new(j1, y1)))
}

/// Ratios `ρ_n = H_n^{(1)}(x) / H_{n-1}^{(1)}(x)` for `n = 1..=nmax`.
///
/// Computed by the forward recurrence `ρ_{n+1} = 2n/x − 1/ρ_n`, which never
/// overflows even when `H_n` itself does (n ≫ x). Entry 0 is unused (set to 1).
pub fn hankel_ratio_sequence(nmax: usize, x: f64) -> Result<Vec<C64>> {
    let (h0, h1) = hankel01(x)?;
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(C64::new(1.0, 0.0));
    if nmax == 0 {
        return Ok(out);
    }
    let mut rho = h1 / h0;
    out.push(rho);
    for n in 1..nmax {
        rho = C64::new(2.0 * n as f64 / x, 0.0) - rho.inv();
        out.push(rho);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (n, x, J_n, Y_n) from 30-digit arithmetic.
    const REFERENCE: &[(u32, f64, f64, f64)] = &[
        (0, 1.0, 0.76519768655796655145, 0.088256964215676957983),
        (1, 1.0, 0.44005058574493351596, -0.78121282130028871655),
        (0, 0.1, 0.997501562066040032, -1.5342386513503668083),
        (0, 5.0, -0.17759677131433830435, -0.30851762524903378007),
        (1, 5.0, -0.32757913759146522204, 0.1478631433912268448),
        (5, 5.0, 0.26114054612017009005, -0.45369482249110188076),
        (10, 3.0, 0.000012928351645715883778, -2582.6071294842996691),
        (0, 12.0, 0.047689310796833536624, -0.22523731263436143369),
        (1, 12.0, -0.22344710449062761237, -0.05709921826089652105),
        (0, 15.0, -0.014224472826780773234, 0.20546429603891826479),
        (1, 19.9, 0.050117424807379740922, -0.17178303121049256457),
        (0, 20.1, 0.15953606793729709074, 0.078810592428750292646),
        (3, 25.0, 0.10834308106150889528, 0.11792485039689295326),
        (20, 30.0, 0.0048310199934040645386, -0.16848153948742676694),
        (40, 30.0, 0.00036120236088965853089, -33.393668907330313538),
        (0, 30.0, -0.086367983581040211336, -0.11729573168666402525),
        (1, 30.0, -0.11875106261662293652, 0.084425570661747234891),
        (0, 50.0, 0.055812327669251815005, -0.098064995470077079029),
        (1, 80.0, -0.05605729667571257751, 0.069395913784588047296),
        (2, 0.5, 0.030604023458682641307, -5.4413708371742657196),
        (7, 12.0, -0.1702538041272080471, 0.18952069552168660076),
    ];

    #[test]
    fn matches_high_precision_reference() {
        for &(n, x, j, y) in REFERENCE {
            let v = bessel_jy(n, x).unwrap();
            assert!((v.j - j).abs() <= 1e-12 * j.abs().max(1.0), "J_{n}({x}) = {} vs {j}", v.j);
            assert!((v.y - y).abs() <= 1e-12 * y.abs().max(1.0), "Y_{n}({x}) = {} vs {y}", v.y);
        }
    }

    #[test]
    fn large_order_relative_accuracy() {
        // (40, 10) and (60, 20): J tiny, Y huge
        let v = bessel_jy(40, 10.0).unwrap();
        assert!((v.j / 6.0308953123469066317e-21 - 1.0).abs() < 1e-10);
        assert!((v.y / -1362803297269337395.4 - 1.0).abs() < 1e-10);
        let v = bessel_jy(60, 20.0).unwrap();
        assert!((v.j / 2.2809263887335596395e-23 - 1.0).abs() < 1e-10);
        assert!((v.y / -2.4670257583513079176e20 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn j0_first_zero_by_bisection() {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if bessel_jy(0, mid).unwrap().j > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((0.5 * (lo + hi) - 2.404825557695773).abs() < 1e-12);
    }

    #[test]
    fn tiny_argument_leading_term() {
        let x = 1e-8;
        let v = bessel_jy(1, x).unwrap();
        assert!((v.j / (0.5 * x) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn wronskian_and_recurrence_grid() {
        for xi in 1..=300 {
            let x = 0.1 * xi as f64;
            for n in 0..=20u32 {
                let v = bessel_jy(n, x).unwrap();
                let w = v.j * v.yp - v.jp * v.y;
                let expected = 2.0 / (PI * x);
                assert!(
                    ((w - expected) / expected).abs() < 1e-10,
                    "Wronskian n={n} x={x}: {w} vs {expected}"
                );
                if n >= 1 {
                    let a = bessel_jy(n - 1, x).unwrap().j;
                    let b = bessel_jy(n + 1, x).unwrap().j;
                    let lhs = a + b;
                    let rhs = 2.0 * n as f64 / x * v.j;
                    assert!((lhs - rhs).abs() < 1e-10, "recurrence n={n} x={x}");
                }
            }
        }
    }

    #[test]
    fn crossover_is_continuous() {
        let below = hankel01(ASYMPTOTIC_CROSSOVER - 1e-13).unwrap();
        let above = hankel01(ASYMPTOTIC_CROSSOVER).unwrap();
        assert!((below.0 - above.0).norm() < 1e-13);
        assert!((below.1 - above.1).norm() < 1e-13);
    }

    #[test]
    fn hankel_ratios_agree_with_direct() {
        let x = 10.0;
        let rho = hankel_ratio_sequence(30, x).unwrap();
        for n in 1..=30u32 {
            let a = bessel_jy(n, x).unwrap().hankel();
            let b = bessel_jy(n - 1, x).unwrap().hankel();
            assert!(((a / b) / rho[n as usize] - 1.0).norm() < 1e-11);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(bessel_jy(0, 0.0), Err(Error::NonPositiveArgument { .. })));
        assert!(matches!(bessel_jy(0, -1.0), Err(Error::NonPositiveArgument { .. })));
        assert!(matches!(bessel_jy(MAX_ORDER + 1, 1.0), Err(Error::OrderOutOfRange { .. })));
    }
}
