//! The Vandermonde functional on the ring, the non-colliding walk ("Gordenko
//! chain") and TASEP, their stationary laws, transition probabilities and the
//! exponential martingale linking them.

use crate::budget::Budget;
use crate::error::{BeadError, Result};
use crate::kernels::{mixed_correlation, Flavor, KernelPoint, RingKernelParams};
use crate::linalg::{det, expm_generator};
use crate::ringset::{binomial, colex_unrank, ring_sets, RingSet};
use crate::roots::unit_pi;
use nalgebra::DMatrix;
use num_complex::Complex64;
pub use crate::mc::rng_for;
use rand::Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::str::FromStr;

/// `sin(pi ell / n) / sin(pi / n)`, the total jump rate of the non-colliding walk.
pub fn mu(n: usize, ell: usize) -> f64 {
    (PI * ell as f64 / n as f64).sin() / (PI / n as f64).sin()
}

/// `ln |e^{2 pi i a/n} - e^{2 pi i b/n}| = ln 2|sin(pi (a-b)/n)|`.
fn log_chord(a: i64, b: i64, n: usize) -> f64 {
    let d = (a - b).rem_euclid(n as i64);
    (2.0 * (PI * d as f64 / n as f64).sin()).ln()
}

/// `ln Delta` for a tuple of sites; `-inf` when two sites coincide mod `n`.
pub fn log_delta_tuple(h: &[i64], n: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..h.len() {
        for j in 0..k {
            if (h[k] - h[j]).rem_euclid(n as i64) == 0 {
                return f64::NEG_INFINITY;
            }
            acc += log_chord(h[k], h[j], n);
        }
    }
    acc
}

pub fn log_delta(e: &RingSet) -> f64 {
    let v: Vec<i64> = e.members().map(|h| h as i64).collect();
    log_delta_tuple(&v, e.n())
}

/// Product of pairwise chord lengths of the points `e^{2 pi i h / n}`, `h in E`.
pub fn delta(e: &RingSet) -> f64 {
    log_delta(e).exp()
}

/// `Delta(E)^2 / n^ell`.
pub fn stationary_prob(e: &RingSet) -> f64 {
    (2.0 * log_delta(e) - e.len() as f64 * (e.n() as f64).ln()).exp()
}

/// Number of particles whose clockwise neighbour site is occupied.
pub fn traffic(e: &RingSet) -> usize {
    e.members().filter(|&h| e.contains(e.succ(h))).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootDet {
    pub det: Complex64,
    pub predicted: Complex64,
    pub rel_residual: f64,
}

/// `det [z_k^{h_j}]` with `z_k = exp((2 pi i / n)((n - ell + 1)/2 + k - 1))`,
/// compared with `sgn(sigma_h) (-1)^{sum h} i^{ell(ell-1)/2} Delta(h)`.
pub fn det_root_matrix(n: usize, h: &[i64]) -> Result<RootDet> {
    let ell = h.len();
    if ell == 0 || ell > n {
        return Err(BeadError::domain(format!("tuple length {ell} outside 1..=n")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut sorted: Vec<i64> = h.iter().map(|x| x.rem_euclid(n as i64)).collect();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Ok(RootDet {
            det: zero,
            predicted: zero,
            rel_residual: 0.0,
        });
    }
    // Angle of z_k in units of pi/n: n - ell - 1 + 2k.
    let m = DMatrix::from_fn(ell, ell, |j, k| {
        let num = (n as i64 - ell as i64 - 1 + 2 * (k as i64 + 1)) * h[j];
        unit_pi(num, n)
    });
    let d = det(m);

    let mut inversions = 0usize;
    for a in 0..ell {
        for b in a + 1..ell {
            if h[a] > h[b] {
                inversions += 1;
            }
        }
    }
    let sum_h: i64 = h.iter().sum();
    let sign = if (inversions as i64 + sum_h).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let i_pow = unit_pi((ell * (ell - 1) / 2) as i64, 2);
    let predicted = i_pow * sign * log_delta_tuple(h, n).exp();
    let rel_residual = (d - predicted).norm() / predicted.norm();
    Ok(RootDet {
        det: d,
        predicted,
        rel_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chain {
    Gordenko,
    Tasep,
}

impl FromStr for Chain {
    type Err = BeadError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gordenko" => Ok(Chain::Gordenko),
            "tasep" => Ok(Chain::Tasep),
            _ => Err(BeadError::structural(format!("unknown chain {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Move {
    pub from: usize,
    pub target: RingSet,
    pub rate: f64,
}

/// Jumps `h -> h+1` with rate `Delta(E') / Delta(E)`.
pub fn gordenko_rates(e: &RingSet) -> Vec<Move> {
    let base = log_delta(e);
    e.movable()
        .map(|h| {
            let target = e.jump(h).expect("movable");
            Move {
                from: h,
                target,
                rate: (log_delta(&target) - base).exp(),
            }
        })
        .collect()
}

/// Every unblocked particle jumps at rate 1.
pub fn tasep_rates(e: &RingSet) -> Vec<Move> {
    e.movable()
        .map(|h| Move {
            from: h,
            target: e.jump(h).expect("movable"),
            rate: 1.0,
        })
        .collect()
}

pub fn rates(chain: Chain, e: &RingSet) -> Vec<Move> {
    match chain {
        Chain::Gordenko => gordenko_rates(e),
        Chain::Tasep => tasep_rates(e),
    }
}

fn check_ring(n: usize, ell: usize) -> Result<()> {
    if n < 2 || ell == 0 || ell >= n {
        return Err(BeadError::domain(format!("need n >= 2 and 1 <= ell <= n-1, got n={n}, ell={ell}")));
    }
    Ok(())
}

/// Dense generator with states in colex order.
pub fn generator_matrix(chain: Chain, n: usize, ell: usize, budget: &Budget) -> Result<DMatrix<f64>> {
    check_ring(n, ell)?;
    let count = binomial(n as u64, ell as u64);
    Budget::check("dense rate-matrix states", count, budget.dense_states)?;
    let states = ring_sets(n, ell)?;
    let mut q = DMatrix::zeros(states.len(), states.len());
    for (i, e) in states.iter().enumerate() {
        for mv in rates(chain, e) {
            let j = mv.target.colex_rank() as usize;
            q[(i, j)] += mv.rate;
            q[(i, i)] -= mv.rate;
        }
    }
    Ok(q)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub ell: usize,
    pub states: u64,
    /// `max_E |sum of rates out of E - mu|`.
    pub exit_rate_residual: f64,
    /// `max_E |outflow - inflow| / outflow` for `Delta^2 / n^ell`.
    pub balance_residual: f64,
    /// `max_E |G_TASEP Delta - (mu - ell + Traffic) Delta| / Delta`.
    pub generator_residual: f64,
    /// Global balance of the uniform law under TASEP, same normalisation.
    pub tasep_balance_residual: f64,
    /// `|sum_E Delta(E)^2 / n^ell - 1|`.
    pub normalisation_residual: f64,
}

/// Enumerate every `ell`-subset and check the stationary and generator identities.
pub fn dynamics_identities(n: usize, ell: usize, budget: &Budget) -> Result<EnumerationReport> {
    check_ring(n, ell)?;
    let count = binomial(n as u64, ell as u64);
    Budget::check("rate-matrix states", count, budget.states)?;
    let m = mu(n, ell);
    struct StateCheck {
        pi: f64,
        flows: Vec<(usize, f64)>,
        exit: f64,
        generator: f64,
    }
    let per_state: Vec<StateCheck> = (0..count)
        .into_par_iter()
        .map(|r| {
            let e = RingSet::from_bits(n, colex_unrank(r, ell as u32)).expect("in range");
            let pi = stationary_prob(&e);
            let moves = gordenko_rates(&e);
            let out: f64 = moves.iter().map(|mv| mv.rate).sum();
            let lhs: f64 = moves.iter().map(|mv| mv.rate - 1.0).sum();
            let rhs = m - ell as f64 + traffic(&e) as f64;
            StateCheck {
                pi,
                flows: moves.iter().map(|mv| (mv.target.colex_rank() as usize, mv.rate)).collect(),
                exit: (out - m).abs(),
                generator: (lhs - rhs).abs(),
            }
        })
        .collect();

    let mut inflow = vec![0.0; count as usize];
    let mut tasep_in = vec![0usize; count as usize];
    for s in &per_state {
        for &(j, rate) in &s.flows {
            inflow[j] += s.pi * rate;
            tasep_in[j] += 1;
        }
    }
    let mut report = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (r, s) in per_state.iter().enumerate() {
        let outflow = s.pi * s.flows.iter().map(|f| f.1).sum::<f64>();
        let out_t = s.flows.len() as f64;
        report.0 = report.0.max(s.exit);
        report.1 = report.1.max((outflow - inflow[r]).abs() / outflow);
        report.2 = report.2.max(s.generator);
        report.3 = report.3.max((out_t - tasep_in[r] as f64).abs() / out_t);
        report.4 += s.pi;
    }
    let (exit_rate_residual, balance_residual, generator_residual, tasep_balance_residual, total) = report;
    Ok(EnumerationReport {
        n,
        ell,
        states: count,
        exit_rate_residual,
        balance_residual,
        generator_residual,
        tasep_balance_residual,
        normalisation_residual: (total - 1.0).abs(),
    })
}

/// Max relative residual of `G_TASEP Delta = (mu - ell + Traffic) Delta` over all states.
pub fn generator_identity_check(n: usize, ell: usize, budget: &Budget) -> Result<f64> {
    Ok(dynamics_identities(n, ell, budget)?.generator_residual)
}

/// Entry `E -> E'` of the transition matrix from the `2 ell`-point determinant
/// of the occupied-flavor ring kernel.
pub fn transition_prob_kernel(e: &RingSet, e2: &RingSet, t: f64) -> Result<f64> {
    let (n, ell) = (e.n(), e.len());
    if e2.n() != n || e2.len() != ell {
        return Err(BeadError::domain("both states need the same n and ell"));
    }
    if !(t > 0.0) {
        return Err(BeadError::domain(format!("transition time {t} must be positive")));
    }
    let params = RingKernelParams::new(n, ell)?;
    let points: Vec<KernelPoint> = e
        .members()
        .map(|h| KernelPoint::new(Flavor::O, 0.0, h as i64))
        .chain(e2.members().map(|h| KernelPoint::new(Flavor::O, t, h as i64)))
        .collect();
    let d = mixed_correlation(&points, &params)?;
    let scale = (ell as f64 * (n as f64).ln() - 2.0 * log_delta(e)).exp();
    let v = d * scale;
    if v.im.abs() > 1e-9 * v.re.abs().max(1.0) {
        return Err(BeadError::Numerical(format!("transition probability has imaginary part {}", v.im)));
    }
    Ok(v.re)
}

/// Full transition matrix from the kernel, states in colex order.
pub fn transition_matrix_kernel(n: usize, ell: usize, t: f64, budget: &Budget) -> Result<DMatrix<f64>> {
    check_ring(n, ell)?;
    Budget::check("dense rate-matrix states", binomial(n as u64, ell as u64), budget.dense_states)?;
    let states = ring_sets(n, ell)?;
    let mut m = DMatrix::zeros(states.len(), states.len());
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            m[(i, j)] = transition_prob_kernel(a, b, t)?;
        }
    }
    Ok(m)
}

/// `exp(Q t)` for the non-colliding walk generator.
pub fn transition_matrix_expm(n: usize, ell: usize, t: f64, budget: &Budget) -> Result<DMatrix<f64>> {
    let q = generator_matrix(Chain::Gordenko, n, ell, budget)?;
    Ok(expm_generator(&q, t))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    pub estimate: f64,
    pub expected: f64,
}

pub const RATE_STENCIL: (f64, f64) = (1e-4, 5e-5);

/// Small-time slope of the kernel transition probability for the move
/// `h -> h+1`, Richardson-extrapolated over two step sizes.
pub fn rate_from_kernel(e: &RingSet, h: usize) -> Result<RateEstimate> {
    let target = e
        .jump(h)
        .ok_or_else(|| BeadError::domain(format!("site {h} cannot jump in {e:?}")))?;
    let (t1, t2) = RATE_STENCIL;
    let p1 = transition_prob_kernel(e, &target, t1)? / t1;
    let p2 = transition_prob_kernel(e, &target, t2)? / t2;
    let ratio = t1 / t2;
    Ok(RateEstimate {
        estimate: (ratio * p2 - p1) / (ratio - 1.0),
        expected: (log_delta(&target) - log_delta(e)).exp(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Event {
    pub time: f64,
    pub from: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub chain: Chain,
    pub initial: RingSet,
    pub events: Vec<Event>,
    pub horizon: f64,
}

/// Event-driven exact simulation up to `horizon`.
pub fn simulate<R: Rng>(chain: Chain, start: RingSet, horizon: f64, rng: &mut R) -> Result<Trajectory> {
    check_ring(start.n(), start.len())?;
    if !(horizon >= 0.0) || !horizon.is_finite() {
        return Err(BeadError::domain(format!("horizon {horizon} must be finite and non-negative")));
    }
    let mut state = start;
    let mut time = 0.0;
    let mut events = Vec::new();
    loop {
        let moves = rates(chain, &state);
        let total: f64 = moves.iter().map(|m| m.rate).sum();
        assert!(total > 0.0, "frozen state {state:?}");
        let hold: f64 = rng.sample::<f64, _>(Exp1) / total;
        time += hold;
        if time > horizon {
            break;
        }
        let mut u = rng.random::<f64>() * total;
        let mut pick = moves[moves.len() - 1];
        for m in &moves {
            if u < m.rate {
                pick = *m;
                break;
            }
            u -= m.rate;
        }
        events.push(Event { time, from: pick.from });
        state = pick.target;
    }
    Ok(Trajectory {
        chain,
        initial: start,
        events,
        horizon,
    })
}

impl Trajectory {
    /// Walk the piecewise-constant path on `[0, t]`, calling `f(state, duration)`.
    fn for_each_holding(&self, t: f64, mut f: impl FnMut(&RingSet, f64)) {
        let mut state = self.initial;
        let mut last = 0.0;
        for ev in self.events.iter().take_while(|ev| ev.time <= t) {
            f(&state, ev.time - last);
            state = state.jump(ev.from).expect("recorded event is legal");
            last = ev.time;
        }
        f(&state, t - last);
    }

    pub fn state_at(&self, t: f64) -> RingSet {
        let mut state = self.initial;
        for ev in self.events.iter().take_while(|ev| ev.time <= t) {
            state = state.jump(ev.from).expect("recorded event is legal");
        }
        state
    }

    pub fn final_state(&self) -> RingSet {
        self.state_at(self.horizon)
    }

    /// `int_0^t Traffic(X_s) ds`, summed over holding intervals.
    pub fn traffic_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        self.for_each_holding(t, |s, dt| acc += traffic(s) as f64 * dt);
        acc
    }

    /// Time spent in each state on `[0, t]`, indexed by colex rank.
    pub fn sojourn_by_rank(&self, t: f64) -> Vec<f64> {
        let count = binomial(self.initial.n() as u64, self.initial.len() as u64) as usize;
        let mut v = vec![0.0; count];
        self.for_each_holding(t, |s, dt| v[s.colex_rank() as usize] += dt);
        v
    }

    pub fn jumps_before(&self, t: f64) -> usize {
        self.events.iter().take_while(|ev| ev.time <= t).count()
    }

    /// `(Delta(X_0) / Delta(X_t)) exp(int_0^t (Traffic(X_s) - c) ds)` with
    /// `c = ell - sin(pi ell/n)/sin(pi/n)`.
    pub fn martingale_weight(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(BeadError::domain(format!("time {t} outside [0, {}]", self.horizon)));
        }
        let c = martingale_constant(self.initial.n(), self.initial.len());
        let log_w = log_delta(&self.initial) - log_delta(&self.state_at(t)) + self.traffic_integral(t) - c * t;
        Ok(log_w.exp())
    }
}

/// `ell - sin(pi ell/n)/sin(pi/n)`: the gap between the TASEP and
/// non-colliding exit rates once traffic is removed.
pub fn martingale_constant(n: usize, ell: usize) -> f64 {
    ell as f64 - mu(n, ell)
}

/// The first state in colex order, `{0, ..., ell-1}`.
pub fn packed_state(n: usize, ell: usize) -> Result<RingSet> {
    check_ring(n, ell)?;
    RingSet::from_bits(n, (1u64 << ell) - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicSummary {
    pub chain: Chain,
    pub n: usize,
    pub ell: usize,
    pub horizon: f64,
    pub replicas: u64,
    pub jumps: u64,
    /// Total variation between pooled occupation-time fractions and
    /// `Delta^2/n^ell`; `None` when the state space exceeds the budget.
    pub tv: Option<f64>,
    /// Total variation of the first replica alone.
    pub tv_first_replica: Option<f64>,
    /// Jumps per unit time per string.
    pub density: f64,
    /// Batch-means standard error of `density`.
    pub density_se: f64,
    /// `sin(pi ell/n) / (n sin(pi/n))`, the stationary bead density of the
    /// non-colliding walk.
    pub expected_density: f64,
}

const BATCHES_PER_REPLICA: usize = 20;

fn tv_distance(sojourn: &[f64], total: f64, stationary: &[f64]) -> f64 {
    0.5 * sojourn
        .iter()
        .zip(stationary)
        .map(|(s, p)| (s / total - p).abs())
        .sum::<f64>()
}

/// Independent trajectories from `start`, replica `r` on stream `r` of `seed`.
pub fn simulate_replicas(chain: Chain, start: RingSet, horizon: f64, seed: u64, replicas: u64) -> Result<Vec<Trajectory>> {
    (0..replicas)
        .into_par_iter()
        .map(|r| simulate(chain, start, horizon, &mut rng_for(seed, r)))
        .collect()
}

/// Pooled occupation-time and jump statistics of equal-horizon trajectories.
pub fn summarize(trajs: &[Trajectory], budget: &Budget) -> Result<ErgodicSummary> {
    let first = trajs.first().ok_or_else(|| BeadError::domain("no trajectories to summarize"))?;
    let (chain, horizon) = (first.chain, first.horizon);
    let (n, ell) = (first.initial.n(), first.initial.len());
    if !(horizon > 0.0) {
        return Err(BeadError::domain("summaries need a positive horizon"));
    }
    let width = horizon / BATCHES_PER_REPLICA as f64;
    let mut batch_means = Vec::with_capacity(trajs.len() * BATCHES_PER_REPLICA);
    let mut jumps = 0u64;
    for traj in trajs {
        let mut batches = vec![0.0; BATCHES_PER_REPLICA];
        for ev in &traj.events {
            let b = ((ev.time / width) as usize).min(BATCHES_PER_REPLICA - 1);
            batches[b] += 1.0 / (width * n as f64);
        }
        batch_means.extend(batches);
        jumps += traj.events.len() as u64;
    }
    let total_time = horizon * trajs.len() as f64;
    let nb = batch_means.len() as f64;
    let bm_mean = batch_means.iter().sum::<f64>() / nb;
    let var = batch_means.iter().map(|x| (x - bm_mean).powi(2)).sum::<f64>() / (nb - 1.0);

    let count = binomial(n as u64, ell as u64);
    let (tv, tv_first_replica) = if count <= budget.states {
        let stationary: Vec<f64> = ring_sets(n, ell)?.iter().map(stationary_prob).collect();
        let per_run: Vec<Vec<f64>> = trajs.par_iter().map(|t| t.sojourn_by_rank(horizon)).collect();
        let mut pooled = vec![0.0; count as usize];
        for soj in &per_run {
            for (p, s) in pooled.iter_mut().zip(soj) {
                *p += s;
            }
        }
        (
            Some(tv_distance(&pooled, total_time, &stationary)),
            Some(tv_distance(&per_run[0], horizon, &stationary)),
        )
    } else {
        (None, None)
    };
    Ok(ErgodicSummary {
        chain,
        n,
        ell,
        horizon,
        replicas: trajs.len() as u64,
        jumps,
        tv,
        tv_first_replica,
        density: jumps as f64 / (total_time * n as f64),
        density_se: (var / nb).sqrt(),
        expected_density: mu(n, ell) / n as f64,
    })
}

/// Pool `replicas` trajectories started from the packed state.
pub fn ergodic_summary(chain: Chain, n: usize, ell: usize, horizon: f64, seed: u64, replicas: u64, budget: &Budget) -> Result<ErgodicSummary> {
    if replicas == 0 {
        return Err(BeadError::domain("need at least one replica"));
    }
    let trajs = simulate_replicas(chain, packed_state(n, ell)?, horizon, seed, replicas)?;
    summarize(&trajs, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, m: &[i64]) -> RingSet {
        RingSet::from_members(n, m.iter().copied()).unwrap()
    }

    #[test]
    fn chord_products() {
        assert!((delta(&set(4, &[0, 1])) - 2f64.sqrt()).abs() < 1e-15);
        assert!((delta(&set(4, &[0, 2])) - 2.0).abs() < 1e-15);
        assert_eq!(delta(&set(7, &[3])), 1.0);
    }

    #[test]
    fn stationary_examples() {
        assert!((stationary_prob(&set(4, &[0, 1])) - 0.125).abs() < 1e-15);
        assert!((stationary_prob(&set(2, &[1])) - 0.5).abs() < 1e-15);
        for n in 2..=10 {
            for ell in 1..n {
                let s: f64 = ring_sets(n, ell).unwrap().iter().map(stationary_prob).sum();
                assert!((s - 1.0).abs() < 1e-12, "n={n} ell={ell}");
            }
        }
    }

    #[test]
    fn rate_examples() {
        let r = gordenko_rates(&set(2, &[0]));
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].target, set(2, &[1]));
        assert!((r[0].rate - 1.0).abs() < 1e-15);
        let t = tasep_rates(&set(5, &[0, 1, 3]));
        assert_eq!(t.iter().map(|m| m.from).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(traffic(&set(5, &[0, 1, 3])), 1);
        assert_eq!(traffic(&RingSet::full(6).unwrap()), 6);
        assert_eq!(traffic(&RingSet::empty(6).unwrap()), 0);
    }

    #[test]
    fn root_matrix_examples() {
        let one = det_root_matrix(5, &[3]).unwrap();
        assert!((one.det.norm() - 1.0).abs() < 1e-15);
        let two = det_root_matrix(4, &[0, 1]).unwrap();
        assert!((two.det.norm() - 2f64.sqrt()).abs() < 1e-14);
        assert!(two.rel_residual < 1e-12);
        let rep = det_root_matrix(4, &[2, 2]).unwrap();
        assert_eq!(rep.det, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn identities_small_rings() {
        let r = dynamics_identities(4, 2, &Budget::default()).unwrap();
        assert!(r.exit_rate_residual < 1e-12);
        assert!(r.generator_residual < 1e-12);
        assert!(r.balance_residual < 1e-12);
        assert!(r.tasep_balance_residual == 0.0);
        assert!(generator_identity_check(2, 1, &Budget::default()).unwrap() < 1e-15);
        assert!(generator_identity_check(10, 3, &Budget::default()).unwrap() < 1e-10);
    }

    #[test]
    fn constants() {
        assert!((mu(4, 2) - 2f64.sqrt()).abs() < 1e-15);
        assert!((martingale_constant(4, 2) - (2.0 - 2f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn kernel_transitions_sum_to_one() {
        let states = ring_sets(4, 2).unwrap();
        for &t in &[0.1, 1.0] {
            let s: f64 = states.iter().map(|b| transition_prob_kernel(&states[0], b, t).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn simulation_is_reproducible_and_legal() {
        let start = packed_state(6, 3).unwrap();
        let a = simulate(Chain::Gordenko, start, 50.0, &mut rng_for(7, 0)).unwrap();
        let b = simulate(Chain::Gordenko, start, 50.0, &mut rng_for(7, 0)).unwrap();
        let c = simulate(Chain::Gordenko, start, 50.0, &mut rng_for(7, 1)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.final_state().len(), 3);
        assert_eq!(a.martingale_weight(0.0).unwrap(), 1.0);
        assert!(a.martingale_weight(51.0).is_err());
        let total: f64 = a.sojourn_by_rank(50.0).iter().sum();
        assert!((total - 50.0).abs() < 1e-9);
    }
}
