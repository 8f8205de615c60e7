//! Exact volumes of interlaced configurations and the partition function.
//!
//! The volume of configurations with `n` strings, `k` beads per string and
//! occupation number `l` is
//!
//! ```text
//! Vol(n,k,l) = (-1)^{k(l+1)} / (nk)!  *  sum over l-subsets S of Z_n of (sum_{j in S} w^j)^{nk}
//! ```
//!
//! with `w = exp(2 pi i / n)`. Sums run in [`LogComplex`] because the terms
//! span hundreds of orders of magnitude once `nk` reaches a few hundred.

use crate::budget::Budget;
use crate::error::{BeadError, Result};
use crate::logcomplex::{ln_factorial, LogComplex};
use crate::progress;
use crate::ringset::{binomial, colex_unrank, next_colex, MAX_N};
use crate::roots::RootSystem;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Subset sums below this modulus are exact zeros (unions of regular polygons).
const ZERO_SUM: f64 = 1e-10;
/// Largest tolerated `|Im| / |value|` after summation.
pub const IMAG_TOLERANCE: f64 = 1e-6;
const CHUNK: u64 = 1 << 14;

/// Which subset family a volume sum enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Subsets of size `l`.
    Direct,
    /// Subsets of size `n - l`.
    Complement,
    /// Centered subsets of size `l`, one per rotation class.
    Centered,
    /// Closed form without enumeration.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeResult {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub value: f64,
    pub log_value: LogComplex,
    pub imag_residual: f64,
    pub side: Side,
    pub terms: u64,
}

fn check_query(n: usize, k: usize, ell: usize) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(BeadError::domain(format!("n={n} outside 2..={MAX_N}")));
    }
    if ell > n {
        return Err(BeadError::domain(format!("ell={ell} exceeds n={n}")));
    }
    if (n as u128) * (k as u128) > u32::MAX as u128 {
        return Err(BeadError::domain(format!("nk={}x{} is too large", n, k)));
    }
    Ok(())
}

fn trivial(n: usize, k: usize, ell: usize) -> Option<VolumeResult> {
    let value = if k == 0 {
        binomial(n as u64, ell as u64) as f64
    } else if ell == 0 || ell == n {
        0.0
    } else {
        return None;
    };
    Some(VolumeResult {
        n,
        k,
        ell,
        value,
        log_value: LogComplex::from_real(value),
        imag_residual: 0.0,
        side: Side::Trivial,
        terms: 0,
    })
}

/// Whether a subset sum with argument `arg` lies in `[-pi/2n, 3pi/2n)`.
pub fn is_centered(arg: f64, n: usize) -> bool {
    let mut s = (arg + PI / (2.0 * n as f64)) / (2.0 * PI / n as f64);
    let r = s.round();
    if (s - r).abs() < 1e-9 {
        s = r;
    }
    (0.0..1.0).contains(&s)
}

/// `sum over m-subsets of (subset sum)^power` over the `n`-th roots of unity.
fn subset_power_sum(
    n: usize,
    m: usize,
    power: u64,
    centered_only: bool,
    budget: &Budget,
) -> Result<(LogComplex, u64)> {
    let total = binomial(n as u64, m as u64);
    Budget::check("volume subset terms", total, budget.subsets)?;
    let roots = RootSystem::new(n, 0);
    let roots = roots.roots();
    progress::expect(total);
    let chunks = total.div_ceil(CHUNK);
    let partial: Vec<LogComplex> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let len = CHUNK.min(total - start);
            let mut bits = colex_unrank(start, m as u32);
            let mut terms = Vec::with_capacity(len as usize);
            for i in 0..len {
                if i > 0 {
                    bits = next_colex(bits);
                }
                let mut s = Complex64::new(0.0, 0.0);
                let mut b = bits;
                while b != 0 {
                    s += roots[b.trailing_zeros() as usize];
                    b &= b - 1;
                }
                let r = s.norm();
                if r < ZERO_SUM {
                    continue;
                }
                let arg = s.arg();
                if centered_only && !is_centered(arg, n) {
                    continue;
                }
                let p = power as f64;
                terms.push(LogComplex::new(p * r.ln(), p * arg));
            }
            progress::advance(len);
            LogComplex::sum(&terms)
        })
        .collect();
    Ok((LogComplex::sum(&partial), total))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    n: usize,
    k: usize,
    ell: usize,
    sum: LogComplex,
    multiplier: f64,
    negative: bool,
    side: Side,
    terms: u64,
) -> Result<VolumeResult> {
    let nk = (n * k) as u64;
    let mut total = sum.scale_log(multiplier.ln() - ln_factorial(nk));
    if negative {
        total = -total;
    }
    let (re, imag_residual) = total.real_part();
    if imag_residual > IMAG_TOLERANCE {
        return Err(BeadError::Numerical(format!(
            "volume sum for (n={n}, k={k}, l={ell}) has |Im|/|z| = {imag_residual:.3e}"
        )));
    }
    Ok(VolumeResult {
        n,
        k,
        ell,
        value: re.to_real(),
        log_value: re,
        imag_residual,
        side,
        terms,
    })
}

/// Evaluate the direct (`l`-subset) or complementary (`(n-l)`-subset) form.
pub fn volume_form(n: usize, k: usize, ell: usize, side: Side, budget: &Budget) -> Result<VolumeResult> {
    check_query(n, k, ell)?;
    if let Some(v) = trivial(n, k, ell) {
        return Ok(v);
    }
    let power = (n * k) as u64;
    let (m, sign_exp) = match side {
        Side::Direct => (ell, k * (ell + 1)),
        Side::Complement => (n - ell, k * (n + ell + 1)),
        _ => return Err(BeadError::domain("volume_form takes the direct or complement side")),
    };
    let (sum, terms) = subset_power_sum(n, m, power, false, budget)?;
    finish(n, k, ell, sum, 1.0, sign_exp % 2 == 1, side, terms)
}

/// Exact volume, enumerating whichever side has the smaller subsets.
pub fn volume_exact(n: usize, k: usize, ell: usize, budget: &Budget) -> Result<VolumeResult> {
    let side = if ell <= n.saturating_sub(ell) {
        Side::Direct
    } else {
        Side::Complement
    };
    volume_form(n, k, ell, side, budget)
}

/// Exact volume from centered subsets only, scaled by `n`.
pub fn volume_exact_centered(n: usize, k: usize, ell: usize, budget: &Budget) -> Result<VolumeResult> {
    check_query(n, k, ell)?;
    if ell == 0 {
        return Err(BeadError::domain("the centered form needs l >= 1"));
    }
    if let Some(v) = trivial(n, k, ell) {
        return Ok(v);
    }
    let (sum, terms) = subset_power_sum(n, ell, (n * k) as u64, true, budget)?;
    finish(n, k, ell, sum, n as f64, (k * (ell + 1)) % 2 == 1, Side::Centered, terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientCheck {
    pub direct: VolumeResult,
    pub complement: VolumeResult,
    pub rel_diff: f64,
}

/// Relative tolerance between the direct and complementary forms.
pub const FORM_TOLERANCE: f64 = 1e-10;

/// Evaluate both subset forms and require them to agree.
pub fn volume_coefficient_extraction(n: usize, k: usize, ell: usize, budget: &Budget) -> Result<CoefficientCheck> {
    let direct = volume_form(n, k, ell, Side::Direct, budget)?;
    let complement = volume_form(n, k, ell, Side::Complement, budget)?;
    let rel_diff = log_rel_diff(direct.log_value, complement.log_value);
    if rel_diff > FORM_TOLERANCE {
        return Err(BeadError::Numerical(format!(
            "direct and complementary volume forms differ by {rel_diff:.3e}"
        )));
    }
    Ok(CoefficientCheck {
        direct,
        complement,
        rel_diff,
    })
}

/// `|a - b| / max(|a|, |b|)` for log-stored reals.
pub fn log_rel_diff(a: LogComplex, b: LogComplex) -> f64 {
    match (a.is_zero(), b.is_zero()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => 1.0,
        _ => {
            let m = a.log_mod.max(b.log_mod);
            let x = a.scale_log(-m).to_complex();
            let y = b.scale_log(-m).to_complex();
            (x - y).norm()
        }
    }
}

/// `(-1)^{(theta1+1)(theta2+n+1)}`.
pub fn theta_sign(n: usize, theta1: u8, theta2: u8) -> f64 {
    if ((theta1 as usize + 1) * (theta2 as usize + n + 1)).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Single-theta term of the partition function, with `zeta = exp(-lambda)`.
pub fn partition_theta_zeta(n: usize, zeta: Complex64, t: Complex64, theta1: u8, theta2: u8) -> Complex64 {
    let roots = RootSystem::new(n, theta2);
    let shift = if theta1 == 0 { zeta } else { -zeta };
    let prod: Complex64 = roots.roots().iter().map(|&z| (t * z).exp() - shift).product();
    prod * 0.5 * theta_sign(n, theta1, theta2)
}

pub fn partition_theta(n: usize, lambda: Complex64, t: Complex64, theta1: u8, theta2: u8) -> Complex64 {
    partition_theta_zeta(n, (-lambda).exp(), t, theta1, theta2)
}

/// Partition function as the half-sum of four products over roots.
pub fn partition_product_zeta(n: usize, zeta: Complex64, t: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for theta1 in 0..=1 {
        for theta2 in 0..=1 {
            acc += partition_theta_zeta(n, zeta, t, theta1, theta2);
        }
    }
    acc
}

pub fn partition_product(n: usize, lambda: Complex64, t: Complex64) -> Complex64 {
    partition_product_zeta(n, (-lambda).exp(), t)
}

/// `sum_{k <= kmax} sum_l T^{nk} exp(-lambda l) Vol(n,k,l)`.
pub fn partition_series(n: usize, lambda: Complex64, t: Complex64, kmax: usize, budget: &Budget) -> Result<Complex64> {
    let t_log = LogComplex::from_complex(t);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..=kmax {
        let tk = t_log.powu((n * k) as u64);
        for ell in 0..=n {
            let vol = volume_exact(n, k, ell, budget)?;
            let weight = LogComplex::from_complex((-lambda * ell as f64).exp());
            acc += (tk * weight * vol.log_value).to_complex();
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn closed_form_cases() {
        assert_eq!(volume_exact(3, 0, 1, &b()).unwrap().value, 3.0);
        assert_eq!(volume_exact(4, 2, 0, &b()).unwrap().value, 0.0);
        assert_eq!(volume_exact(4, 2, 4, &b()).unwrap().value, 0.0);
        assert!((volume_exact(2, 1, 1, &b()).unwrap().value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_volumes_by_hand() {
        // n=3, k=1, l=1: three singletons, each w^{3j} = 1, sign (+1), over 3! gives 1/2.
        assert!((volume_exact(3, 1, 1, &b()).unwrap().value - 0.5).abs() < 1e-14);
        // n=4, k=1, l=2: pairs {0,1},{1,2},{2,3},{0,3} give (1+i)^4-type sums = -4,
        // diameters vanish; sign (-1)^3 over 4! gives 16/24.
        assert!((volume_exact(4, 1, 2, &b()).unwrap().value - 16.0 / 24.0).abs() < 1e-14);
    }

    #[test]
    fn complement_side_is_used_above_half() {
        let v = volume_exact(7, 2, 5, &b()).unwrap();
        assert_eq!(v.side, Side::Complement);
        assert_eq!(v.terms, 21);
        let d = volume_form(7, 2, 5, Side::Direct, &b()).unwrap();
        assert!(log_rel_diff(v.log_value, d.log_value) < 1e-12);
    }

    #[test]
    fn centered_matches_direct() {
        for n in 2..=9 {
            for ell in 1..n {
                for k in 1..=2 {
                    let a = volume_exact(n, k, ell, &b()).unwrap();
                    let c = volume_exact_centered(n, k, ell, &b()).unwrap();
                    assert!(log_rel_diff(a.log_value, c.log_value) < 1e-8, "{n} {k} {ell}");
                }
            }
        }
    }

    #[test]
    fn centering_window_is_half_open() {
        let n = 4;
        assert!(is_centered(-PI / 8.0, n));
        assert!(!is_centered(3.0 * PI / 8.0, n));
        assert!(is_centered(0.0, n));
    }

    #[test]
    fn budget_is_enforced() {
        let tight = Budget {
            subsets: 10,
            ..Budget::default()
        };
        let err = volume_exact(10, 1, 5, &tight).unwrap_err();
        assert!(err.is_resource());
    }

    #[test]
    fn huge_volume_stays_finite_in_log_space() {
        let v = volume_exact(20, 20, 10, &b()).unwrap();
        assert!(v.log_value.log_mod.is_finite());
        assert_eq!(v.log_value.phase, 0.0);
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn partition_closed_forms() {
        let lam = Complex64::new(0.7, 0.0);
        let z0 = partition_product(3, lam, Complex64::new(0.0, 0.0));
        let expect = (1.0 + (-0.7f64).exp()).powi(3);
        assert!((z0 - expect).norm() < 1e-14);
        let z = partition_product_zeta(3, Complex64::new(0.0, 0.0), Complex64::new(0.4, 0.1));
        assert!((z - 1.0).norm() < 1e-14);
    }

    #[test]
    fn theta_terms_at_zero_intensity() {
        let lam = Complex64::new(0.5, 0.0);
        let t0 = Complex64::new(0.0, 0.0);
        let e = (-0.5f64).exp();
        let z10 = partition_theta(2, lam, t0, 1, 0);
        assert!((z10 - 0.5 * (1.0 + e).powi(2)).norm() < 1e-15);
        let z00 = partition_theta(2, lam, t0, 0, 0);
        assert!((z00 + 0.5 * (1.0 - e).powi(2)).norm() < 1e-15);
    }

    #[test]
    fn series_matches_product_small_case() {
        let lam = Complex64::new(0.7, 0.0);
        let t = Complex64::new(0.3, 0.0);
        let s = partition_series(2, lam, t, 8, &b()).unwrap();
        let p = partition_product(2, lam, t);
        assert!((s - p).norm() < 1e-10);
    }
}
