//! Closed-form Fredholm determinant `det(I + T C)` and its eigenvalue product.

use crate::error::{BeadError, Result};
use crate::roots::RootSystem;
use crate::volumes::{partition_theta, theta_sign};
use num_complex::Complex64;
use std::f64::consts::PI;

const POLE_TOLERANCE: f64 = 1e-12;

/// Distance from `x` to the lattice `2 pi i Z`.
pub fn distance_to_pole_lattice(x: Complex64) -> f64 {
    let m = (x.im / (2.0 * PI)).round();
    (x - Complex64::new(0.0, 2.0 * PI * m)).norm()
}

pub fn check_not_pole(x: Complex64, what: &str) -> Result<()> {
    if distance_to_pole_lattice(x) < POLE_TOLERANCE {
        return Err(BeadError::Pole(format!("{what} = {x} lies on 2 pi i Z")));
    }
    Ok(())
}

/// `prod_{z^n = (-1)^theta2} sinh((beta + T z)/2) / sinh(beta/2)`.
pub fn fredholm_product(beta: Complex64, theta2: u8, t: Complex64, n: usize) -> Result<Complex64> {
    check_not_pole(beta, "beta")?;
    let denom = (beta / 2.0).sinh();
    Ok(RootSystem::new(n, theta2)
        .roots()
        .iter()
        .map(|&z| ((beta + t * z) / 2.0).sinh() / denom)
        .product())
}

/// Eigenvalue product truncated at `|m| <= big_m`, pairing `m` with `-m`:
/// `prod_z (1 + Tz/beta) prod_{m=1}^{M} (1 + (2 beta T z + T^2 z^2)/(beta^2 + 4 pi^2 m^2))`.
pub fn fredholm_truncated(beta: Complex64, theta2: u8, t: Complex64, n: usize, big_m: u64) -> Result<Complex64> {
    check_not_pole(beta, "beta")?;
    let roots = RootSystem::new(n, theta2);
    let mut acc = Complex64::new(1.0, 0.0);
    for &z in roots.roots() {
        let a = t * z;
        let num = 2.0 * beta * a + a * a;
        let mut f = Complex64::new(1.0, 0.0) + a / beta;
        for m in 1..=big_m {
            let mm = 2.0 * PI * m as f64;
            f *= Complex64::new(1.0, 0.0) + num / (beta * beta + mm * mm);
        }
        acc *= f;
    }
    Ok(acc)
}

/// The single-theta partition term rebuilt from the determinant:
/// `1/2 (-1)^{(theta1+1)(theta2+n+1)} (1 - e^{-beta})^n det(I + T C)`, `beta = lambda + theta1 pi i`.
pub fn partition_theta_via_fredholm(n: usize, lambda: Complex64, t: Complex64, theta1: u8, theta2: u8) -> Result<Complex64> {
    let beta = lambda + Complex64::new(0.0, PI * theta1 as f64);
    let det = fredholm_product(beta, theta2, t, n)?;
    Ok(0.5 * theta_sign(n, theta1, theta2) * (1.0 - (-beta).exp()).powu(n as u32) * det)
}

/// Relative gap between the product and determinant forms of one theta term.
pub fn fredholm_consistency(n: usize, lambda: Complex64, t: Complex64, theta1: u8, theta2: u8) -> Result<f64> {
    let direct = partition_theta(n, lambda, t, theta1, theta2);
    let via = partition_theta_via_fredholm(n, lambda, t, theta1, theta2)?;
    Ok((direct - via).norm() / direct.norm().max(f64::MIN_POSITIVE))
}
