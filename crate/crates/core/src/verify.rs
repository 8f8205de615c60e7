//! Invariant suites run by `bead-lab verify`.

use crate::asymptotics::{convergence_probe, free_energy, partition_numbers, surface_tension};
use crate::budget::Budget;
use crate::dynamics::{
    det_root_matrix, dynamics_identities, packed_state, rate_from_kernel, simulate, stationary_prob,
    transition_matrix_expm, transition_matrix_kernel, Chain,
};
use crate::error::{BeadError, Result};
use crate::fredholm::{fredholm_consistency, fredholm_product, fredholm_truncated};
use crate::kernels::{mixed_correlation, stream_check, verify_inversion, Flavor, KernelPoint, RingKernelParams, TorusKernelParams};
use crate::mc::{rng_for, sample_uniform_config, volume_mc};
use crate::ringset::ring_sets;
use crate::volumes::{
    log_rel_diff, partition_product, partition_series, volume_coefficient_extraction, volume_exact,
    volume_exact_centered, volume_form, Side,
};
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Torus,
    Volumes,
    Kernels,
    Dynamics,
    Asymptotics,
    Mc,
    All,
}

impl Suite {
    pub const EACH: [Suite; 6] = [Suite::Torus, Suite::Volumes, Suite::Kernels, Suite::Dynamics, Suite::Asymptotics, Suite::Mc];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Torus => "torus",
            Suite::Volumes => "volumes",
            Suite::Kernels => "kernels",
            Suite::Dynamics => "dynamics",
            Suite::Asymptotics => "asymptotics",
            Suite::Mc => "mc",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = BeadError;
    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|x| x.name() == s)
            .copied()
            .ok_or_else(|| BeadError::structural(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            passed: value <= tolerance,
            value,
            tolerance,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            passed: ok,
            value: if ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run(suite: Suite, budget: &Budget, seed: u64) -> Result<Vec<SuiteReport>> {
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    list.into_iter()
        .map(|s| {
            let checks = match s {
                Suite::Torus => torus_suite(budget, seed)?,
                Suite::Volumes => volumes_suite(budget)?,
                Suite::Kernels => kernels_suite()?,
                Suite::Dynamics => dynamics_suite(budget, seed)?,
                Suite::Asymptotics => asymptotics_suite(budget)?,
                Suite::Mc => mc_suite(seed)?,
                Suite::All => unreachable!(),
            };
            Ok(SuiteReport { suite: s.name(), checks })
        })
        .collect()
}

fn torus_suite(budget: &Budget, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &(n, k, ell) in &[(2, 1, 1), (3, 2, 1), (4, 2, 2), (5, 1, 3), (6, 1, 2)] {
        let mut tilt_err = 0.0f64;
        let mut p_err = 0.0f64;
        let mut path_ok = true;
        let mut reflect_ok = true;
        let mut rotate_ok = true;
        for i in 0..200u64 {
            let cfg = sample_uniform_config(n, k, ell, seed.wrapping_add(i), budget)?.config;
            let tilt = cfg.tilt()?;
            tilt_err = tilt_err.max((tilt.tau * n as f64 - ell as f64).abs());
            p_err = p_err.max((tilt.sum_p - n as f64).abs());
            let path = cfg.occupation_path()?;
            path_ok &= path.occupation_number() == ell
                && (0..64).all(|j| {
                    let t = (j as f64 + 0.37) / 64.0;
                    let x = cfg.occupied_at(t);
                    x.len() == ell && x == path.state_at(t)
                });
            reflect_ok &= cfg.reflect().occupation_number()? == n - ell;
            rotate_ok &= cfg.rotate(0.37).is_valid();
        }
        let tag = format!("n={n},k={k},l={ell}");
        checks.push(Check::at_most(format!("tilt*n = l [{tag}]"), tilt_err, 1e-12));
        checks.push(Check::at_most(format!("sum p = n [{tag}]"), p_err, 1e-12));
        checks.push(Check::holds(format!("occupation path matches pointwise definition [{tag}]"), path_ok));
        checks.push(Check::holds(format!("reflection gives n-l [{tag}]"), reflect_ok));
        checks.push(Check::holds(format!("rotation keeps validity [{tag}]"), rotate_ok));
    }
    Ok(checks)
}

fn volumes_suite(budget: &Budget) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut centered = 0.0f64;
    let mut symmetry = 0.0f64;
    let mut imag = 0.0f64;
    let mut negative = false;
    for n in 2..=12 {
        for k in 0..=2 {
            for ell in 0..=n {
                let v = volume_exact(n, k, ell, budget)?;
                imag = imag.max(v.imag_residual);
                negative |= v.value < 0.0 || (k >= 1 && (ell == 0 || ell == n)) != (v.value == 0.0);
                if k >= 1 && ell >= 1 && ell < n {
                    let c = volume_exact_centered(n, k, ell, budget)?;
                    centered = centered.max(log_rel_diff(v.log_value, c.log_value));
                    let a = volume_form(n, k, ell, Side::Direct, budget)?;
                    let b = volume_form(n, k, n - ell, Side::Direct, budget)?;
                    symmetry = symmetry.max(log_rel_diff(a.log_value, b.log_value));
                    volume_coefficient_extraction(n, k, ell, budget)?;
                }
            }
        }
    }
    checks.push(Check::at_most("centered form = direct form, n<=12, k<=2", centered, 1e-8));
    checks.push(Check::at_most("Vol(l) = Vol(n-l), n<=12, k<=2", symmetry, 1e-10));
    checks.push(Check::at_most("imaginary residue of volume sums", imag, 1e-6));
    checks.push(Check::holds("volumes are non-negative and vanish exactly at l in {0,n}", !negative));

    let mut series = 0.0f64;
    for n in 2..=4 {
        for &lam in &[-1.0, 0.3, 1.0] {
            for &t in &[0.1, 0.5, 1.0] {
                let (l, t) = (Complex64::new(lam, 0.0), Complex64::new(t, 0.0));
                let p = partition_product(n, l, t);
                let s = partition_series(n, l, t, 8, budget)?;
                series = series.max((p - s).norm() / p.norm());
            }
        }
    }
    checks.push(Check::at_most("partition series (k<=8) = product", series, 1e-8));

    let mut det_gap = 0.0f64;
    for n in 2..=6 {
        for th1 in 0..=1 {
            for th2 in 0..=1 {
                det_gap = det_gap.max(fredholm_consistency(n, Complex64::new(0.45, 0.0), Complex64::new(0.8, 0.3), th1, th2)?);
            }
        }
    }
    checks.push(Check::at_most("theta term = determinant form", det_gap, 1e-12));

    let beta = Complex64::new(1.1, 0.0);
    let t = Complex64::new(0.2, 0.0);
    let exact = fredholm_product(beta, 0, t, 2)?;
    let errs: Vec<f64> = [100, 1000, 10000]
        .iter()
        .map(|&m| fredholm_truncated(beta, 0, t, 2, m).map(|v| (v - exact).norm()))
        .collect::<Result<_>>()?;
    checks.push(Check::holds("truncated eigenvalue product error decreases", errs[0] > errs[1] && errs[1] > errs[2]));
    checks.push(Check::at_most("truncated eigenvalue product error at M=1e4", errs[2], 1e-6));
    Ok(checks)
}

fn complementation_residual(p: &TorusKernelParams) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 0..10 {
        let t = if i == 0 { 0.0 } else { -0.95 + 0.19 * i as f64 };
        for h in 0..p.n as i64 {
            let delta = if t == 0.0 && h == 0 { 1.0 } else { 0.0 };
            let u = p.kernel_torus(Flavor::U, t, h)?;
            let o = p.kernel_torus(Flavor::O, t, h)?;
            worst = worst.max((u + o - delta).norm());
        }
    }
    Ok(worst)
}

/// Parameter sets `(n, beta, theta2, T)` for the complementation check.
pub fn complementation_sets() -> Vec<(usize, Complex64, u8, Complex64)> {
    vec![
        (2, Complex64::new(0.8, 0.0), 0, Complex64::new(0.4, 0.0)),
        (3, Complex64::new(0.5, PI), 1, Complex64::new(1.2, 0.0)),
        (5, Complex64::new(-0.7, 0.0), 0, Complex64::new(0.3, 0.2)),
        (8, Complex64::new(1.5, 0.3), 1, Complex64::new(2.0, 0.0)),
        (12, Complex64::new(0.2, PI), 0, Complex64::new(0.9, -0.1)),
    ]
}

fn kernels_suite() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (mut occ, mut bead, mut vac, mut jump, mut imag, mut cont) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 2..=12 {
        for ell in 1..n {
            let p = RingKernelParams::new(n, ell)?;
            let (nf, lf) = (n as f64, ell as f64);
            let mu = (PI * lf / nf).sin() / (PI / nf).sin();
            occ = occ.max((p.kernel_ring(Flavor::O, 0.0, 0) - lf / nf).norm());
            bead = bead.max((p.kernel_ring(Flavor::B, 0.0, 0) - mu / nf).norm());
            vac = vac.max((p.kernel_ring(Flavor::U, 0.0, 0) - (nf - lf) / nf).norm());
            for f in Flavor::ALL {
                let shift = i64::from(f == Flavor::B);
                for h in shift - n as i64 + 1..shift + n as i64 {
                    let expect = if h == shift {
                        if f == Flavor::O { -1.0 } else { 1.0 }
                    } else {
                        0.0
                    };
                    jump = jump.max((p.kernel_jump(f, h) - expect).norm());
                    for &s in &[-1.3, -0.2, 0.0, 0.4, 2.5] {
                        imag = imag.max(p.kernel_ring(f, s, h).im.abs());
                    }
                    let right = p.right_branch(f, 0.0, h);
                    let left = p.left_branch(f, 0.0, h);
                    cont = cont.max((p.kernel_ring(f, 1e-9, h) - right).norm());
                    cont = cont.max((p.kernel_ring(f, -1e-9, h) - left).norm());
                }
            }
        }
    }
    checks.push(Check::at_most("ring kernel occupied density = l/n, n<=12", occ, 1e-12));
    checks.push(Check::at_most("ring kernel bead density = sin(pi l/n)/(n sin(pi/n)), n<=12", bead, 1e-12));
    checks.push(Check::at_most("ring kernel vacancy density = (n-l)/n, n<=12", vac, 1e-12));
    checks.push(Check::at_most("ring kernel jump at s=0", jump, 1e-12));
    checks.push(Check::at_most("ring kernel is real", imag, 1e-12));
    checks.push(Check::at_most("ring kernel one-sided continuity at 0", cont, 1e-6));

    let mut comp = 0.0f64;
    for (n, beta, th2, t) in complementation_sets() {
        comp = comp.max(complementation_residual(&TorusKernelParams::new(n, beta, th2, t)?)?);
    }
    checks.push(Check::at_most("H_u + H_o = delta on a 10 x n grid, 5 parameter sets", comp, 1e-12));

    let mut stat = 0.0f64;
    for n in 2..=8 {
        for ell in 1..n {
            let p = RingKernelParams::new(n, ell)?;
            for e in ring_sets(n, ell)? {
                let pi = stationary_prob(&e);
                let occupied: Vec<KernelPoint> = e.members().map(|h| KernelPoint::new(Flavor::O, 0.0, h as i64)).collect();
                let full: Vec<KernelPoint> = (0..n)
                    .map(|h| KernelPoint::new(if e.contains(h) { Flavor::O } else { Flavor::U }, 0.0, h as i64))
                    .collect();
                stat = stat.max((mixed_correlation(&occupied, &p)? - pi).norm());
                stat = stat.max((mixed_correlation(&full, &p)? - pi).norm());
            }
        }
    }
    checks.push(Check::at_most("equal-time occupied correlation = Delta^2/n^l, n<=8", stat, 1e-10));

    let p = TorusKernelParams::new(2, Complex64::new(0.9, 0.0), 0, Complex64::new(0.3, 0.0))?;
    let r16 = verify_inversion(&p, 16)?;
    let r64 = verify_inversion(&p, 64)?;
    checks.push(Check::holds(format!("inversion residual decreases (M=16: {r16:.3e}, M=64: {r64:.3e})"), r64 < r16));
    let p0 = TorusKernelParams::new(3, Complex64::new(0.9, 0.0), 1, Complex64::new(0.0, 0.0))?;
    checks.push(Check::at_most("inversion exact at T=0", verify_inversion(&p0, 16)?, 1e-12));
    let s = stream_check(Complex64::new(0.9, 0.0), Complex64::new(0.3, 0.5), 0.25, 0.7, 1000)?;
    checks.push(Check::at_most("stream identity quadrature error", s.error, 1e-6));
    checks.push(Check::holds("stream identity converges at second order", s.error_doubled < s.error / 3.0));
    Ok(checks)
}

fn dynamics_suite(budget: &Budget, seed: u64) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let (mut exit, mut bal, mut gen, mut tasep, mut norm) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 2..=8 {
        for ell in 1..n {
            let r = dynamics_identities(n, ell, budget)?;
            exit = exit.max(r.exit_rate_residual);
            bal = bal.max(r.balance_residual);
            gen = gen.max(r.generator_residual);
            tasep = tasep.max(r.tasep_balance_residual);
            norm = norm.max(r.normalisation_residual);
        }
    }
    checks.push(Check::at_most("constant exit rate mu, n<=8", exit, 1e-10));
    checks.push(Check::at_most("global balance of Delta^2/n^l, n<=8", bal, 1e-10));
    checks.push(Check::at_most("generator identity for Delta, n<=8", gen, 1e-10));
    checks.push(Check::at_most("TASEP uniform global balance, n<=8", tasep, 1e-12));
    checks.push(Check::at_most("stationary law sums to 1, n<=8", norm, 1e-12));

    let mut rng = rng_for(seed, 0x0d37);
    let mut root = 0.0f64;
    for _ in 0..100 {
        let n = rng.random_range(2..=8usize);
        let ell = rng.random_range(1..=n);
        let mut pool: Vec<i64> = (0..n as i64).collect();
        for i in 0..ell {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
        }
        root = root.max(det_root_matrix(n, &pool[..ell])?.rel_residual);
    }
    checks.push(Check::at_most("root-matrix determinant identity, 100 random tuples", root, 1e-10));

    let mut trans = 0.0f64;
    for &t in &[0.1, 0.5, 1.0] {
        let a = transition_matrix_kernel(4, 2, t, budget)?;
        let b = transition_matrix_expm(4, 2, t, budget)?;
        trans = trans.max((a - b).amax());
    }
    checks.push(Check::at_most("kernel transitions = exp(tQ), n=4, l=2", trans, 1e-8));

    let mut rate = 0.0f64;
    for n in 2..=5 {
        for ell in 1..n {
            for e in ring_sets(n, ell)? {
                for h in e.movable().collect::<Vec<_>>() {
                    let r = rate_from_kernel(&e, h)?;
                    rate = rate.max((r.estimate - r.expected).abs());
                }
            }
        }
    }
    checks.push(Check::at_most("kernel small-time rates = Delta ratios, n<=5", rate, 1e-3));

    let start = packed_state(4, 2)?;
    let trials = 20_000u64;
    let mut w = crate::mc::Welford::default();
    for r in 0..trials {
        let traj = simulate(Chain::Gordenko, start, 1.0, &mut rng_for(seed, r))?;
        w.push(traj.martingale_weight(1.0)?);
    }
    let z = (w.mean - 1.0).abs() / w.std_error();
    checks.push(Check::at_most(format!("martingale mean at t=1 (mean {:.5}, {} paths), in SE", w.mean, trials), z, 3.0));
    Ok(checks)
}

fn asymptotics_suite(budget: &Budget) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let p = partition_numbers(5);
    checks.push(Check::holds("p(0..5) = 1,1,2,3,5,7", p == vec![1, 1, 2, 3, 5, 7]));
    let mut rel = 0.0f64;
    for &tau in &[0.1, 0.25, 0.5, 0.9] {
        rel = rel.max((surface_tension(1.0, tau)? + free_energy(tau)?).abs());
    }
    checks.push(Check::at_most("surface tension at g=1 is minus free energy", rel, 1e-14));
    for &tau in &[0.5, 0.25] {
        let rows = convergence_probe(1.0, tau, &[8, 12, 16, 20], budget)?;
        let decreasing = rows.windows(2).all(|w| w[1].rel_error < w[0].rel_error);
        checks.push(Check::holds(format!("fine-constant error decreases over n=8..20 at tau={tau}"), decreasing));
        if tau == 0.5 {
            checks.push(Check::at_most("free-energy error at n=20, p=1, tau=1/2", rows[3].free_energy_error, 0.01));
        }
    }
    Ok(checks)
}

fn mc_suite(seed: u64) -> Result<Vec<Check>> {
    let budget = Budget::default();
    let mut checks = Vec::new();
    for &(n, k, ell) in &[(2, 1, 1), (3, 1, 1), (3, 1, 2), (4, 1, 2), (4, 2, 2), (5, 1, 2)] {
        let exact = volume_exact(n, k, ell, &budget)?.value;
        let est = volume_mc(n, k, ell, 200_000, seed)?;
        let z = if est.std_error > 0.0 { (est.mean - exact).abs() / est.std_error } else if est.mean == exact { 0.0 } else { f64::INFINITY };
        checks.push(Check::at_most(format!("MC volume within 3 SE [n={n},k={k},l={ell}]"), z, 3.0));
    }
    let exact = volume_exact(3, 1, 2, &budget)?.value;
    let covered = (0..20u64)
        .filter(|&s| {
            volume_mc(3, 1, 2, 20_000, seed.wrapping_add(1000 + s))
                .map(|e| (e.mean - exact).abs() <= 3.0 * e.std_error)
                .unwrap_or(false)
        })
        .count();
    checks.push(Check::holds(format!("3-sigma coverage over 20 seeds ({covered}/20)"), covered >= 19));
    Ok(checks)
}
