//! Free energy, surface tension and the fine large-`n` constant of the volumes.

use crate::budget::Budget;
use crate::error::{BeadError, Result};
use crate::volumes::volume_exact;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_TERMS: usize = 64;

fn check_tau(tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(BeadError::domain(format!("tilt {tau} outside (0,1)")));
    }
    Ok(())
}

/// Per-bead free energy at unit density: `1 + ln sin(pi tau) - ln pi`.
pub fn free_energy(tau: f64) -> Result<f64> {
    check_tau(tau)?;
    Ok(1.0 + (PI * tau).sin().ln() - PI.ln())
}

/// `-ln g - ln sin(pi tau) - 1 + ln pi`.
pub fn surface_tension(g: f64, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    if !(g > 0.0) {
        return Err(BeadError::domain(format!("gap {g} must be positive")));
    }
    Ok(-g.ln() - (PI * tau).sin().ln() - 1.0 + PI.ln())
}

/// Partition counts `p(0..=m)` by Euler's pentagonal recurrence.
pub fn partition_numbers(m: usize) -> Vec<u128> {
    let mut p = vec![0u128; m + 1];
    p[0] = 1;
    for i in 1..=m {
        let mut acc: i128 = 0;
        for j in 1.. {
            let j = j as i64;
            let g1 = (j * (3 * j - 1) / 2) as usize;
            if g1 > i {
                break;
            }
            let sign: i128 = if j % 2 == 1 { 1 } else { -1 };
            acc += sign * p[i - g1] as i128;
            let g2 = (j * (3 * j + 1) / 2) as usize;
            if g2 <= i {
                acc += sign * p[i - g2] as i128;
            }
        }
        p[i] = acc as u128;
    }
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    /// Bound on the omitted tail, using `p(m) <= exp(pi sqrt(2m/3))`.
    pub tail_bound: f64,
}

/// Partition generating function `sum_{m <= M} p(m) s^m`.
pub fn partition_gf(s: Complex64, terms: usize) -> Result<SeriesValue> {
    let r = s.norm();
    if r >= 1.0 {
        return Err(BeadError::domain(format!("|s| = {r} must be below 1")));
    }
    if terms == 0 {
        return Err(BeadError::domain("need at least one term"));
    }
    let coeffs = partition_numbers(terms);
    let mut value = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for &c in &coeffs {
        value += power * c as f64;
        power *= s;
    }
    let mut tail_bound = 0.0;
    if r > 0.0 {
        let mut m = terms + 1;
        loop {
            let term = ((PI * (2.0 * m as f64 / 3.0).sqrt()) + m as f64 * r.ln()).exp();
            tail_bound += term;
            if term < 1e-30 * tail_bound.max(1e-300) || m > terms + 1_000_000 {
                break;
            }
            m += 1;
        }
    }
    Ok(SeriesValue { value, tail_bound })
}

/// `q_tau^{+-} = 2 pi^2 +- 2 pi^2 i cot(pi tau)`.
pub fn q_pair(tau: f64) -> (Complex64, Complex64) {
    let c = 2.0 * PI * PI;
    let cot = (PI * tau).cos() / (PI * tau).sin();
    (Complex64::new(c, c * cot), Complex64::new(c, -c * cot))
}

/// `e^{p pi^2/6} / sqrt(2 pi p) * P(e^{-p q+}) P(e^{-p q-})`.
pub fn asymptotic_constant(p: f64, tau: f64) -> Result<f64> {
    asymptotic_constant_with(p, tau, DEFAULT_TERMS)
}

pub fn asymptotic_constant_with(p: f64, tau: f64, terms: usize) -> Result<f64> {
    check_tau(tau)?;
    if !(p > 0.0) {
        return Err(BeadError::domain(format!("density {p} must be positive")));
    }
    let (qp, qm) = q_pair(tau);
    let a = partition_gf((-qp * p).exp(), terms)?.value;
    let b = partition_gf((-qm * p).exp(), terms)?.value;
    let v = a * b * ((p * PI * PI / 6.0).exp() / (2.0 * PI * p).sqrt());
    if v.im.abs() > 1e-12 * v.norm() {
        return Err(BeadError::Numerical(format!("fine constant has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    /// `ln[(e sin(pi l/n)/pi)^{-nk} k^{nk} Vol]`.
    pub lhs_log: f64,
    /// `ln` of the fine constant.
    pub target_log: f64,
    /// `|lhs_log - target_log|`.
    pub abs_error: f64,
    /// `|exp(lhs_log - target_log) - 1|`.
    pub rel_error: f64,
    /// `(1/nk) ln(k^{nk} Vol)`.
    pub free_energy_lhs: f64,
    pub free_energy_target: f64,
    pub free_energy_error: f64,
}

/// Compare exact volumes at `k = floor(p n)`, `l = floor(tau n)` with the
/// free energy and the fine constant.
pub fn convergence_probe(p: f64, tau: f64, n_list: &[usize], budget: &Budget) -> Result<Vec<ProbeRow>> {
    let target = asymptotic_constant(p, tau)?;
    n_list
        .par_iter()
        .map(|&n| {
            let k = (p * n as f64).floor() as usize;
            let ell = (tau * n as f64).floor() as usize;
            if k == 0 || ell == 0 || ell >= n {
                return Err(BeadError::domain(format!(
                    "n={n} gives k={k}, ell={ell}; need k >= 1 and 1 <= ell <= n-1"
                )));
            }
            let vol = volume_exact(n, k, ell, budget)?;
            if vol.log_value.is_zero() || vol.log_value.phase != 0.0 {
                return Err(BeadError::Numerical(format!("volume at n={n} is not positive")));
            }
            let nk = (n * k) as f64;
            let log_scaled = nk * (k as f64).ln() + vol.log_value.log_mod;
            let s = (PI * ell as f64 / n as f64).sin();
            let lhs_log = log_scaled - nk * (1.0 + s.ln() - PI.ln());
            let target_log = target.ln();
            let fe_lhs = log_scaled / nk;
            let fe_target = free_energy(tau)?;
            Ok(ProbeRow {
                n,
                k,
                ell,
                lhs_log,
                target_log,
                abs_error: (lhs_log - target_log).abs(),
                rel_error: (lhs_log - target_log).exp_m1().abs(),
                free_energy_lhs: fe_lhs,
                free_energy_target: fe_target,
                free_energy_error: (fe_lhs - fe_target).abs(),
            })
        })
        .collect()
}
