//! Bessel/Hankel functions of integer order and Mathieu functions.

mod bessel;
mod mathieu;

pub use bessel::{
    bessel_j_sequence, bessel_jy, bessel_y01, hankel01, hankel_ratio_sequence, BesselJY,
    ASYMPTOTIC_CROSSOVER, MAX_ORDER,
};
pub use mathieu::{
    angular_mathieu, mathieu_char, mathieu_coefficients, radial_mathieu, MathieuChar,
    MathieuCoefficients, Parity,
};
