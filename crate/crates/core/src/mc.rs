//! Brute-force Monte Carlo oracles for volumes and uniform configurations.

use crate::budget::Budget;
use crate::error::{BeadError, Result};
use crate::logcomplex::ln_factorial;
use crate::ringset::MAX_N;
use crate::torus::{occupation_from_minima, strings_valid, BeadConfiguration};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// ChaCha8 seeded with `seed`, positioned on stream `stream`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Running mean and centered second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Welford {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Welford {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&self, other: &Welford) -> Welford {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        let (a, b) = (self.count as f64, other.count as f64);
        Welford {
            count,
            mean: self.mean + d * b / count as f64,
            m2: self.m2 + other.m2 + d * d * a * b / count as f64,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
    pub hits: u64,
    pub acceptance_rate: f64,
}

const CHUNK: u64 = 1 << 15;

fn check_volume_query(n: usize, k: usize, ell: usize) -> Result<()> {
    if !(2..=MAX_N).contains(&n) {
        return Err(BeadError::domain(format!("n={n} outside 2..={MAX_N}")));
    }
    if k == 0 {
        return Err(BeadError::domain("Monte Carlo volumes need k >= 1"));
    }
    if ell > n {
        return Err(BeadError::domain(format!("ell={ell} exceeds n={n}")));
    }
    Ok(())
}

/// Draw `k` sorted uniforms per string into `buf`.
fn draw_strings<R: Rng>(rng: &mut R, buf: &mut [f64], k: usize) {
    for x in buf.iter_mut() {
        *x = rng.random::<f64>();
    }
    for s in buf.chunks_mut(k) {
        s.sort_unstable_by(f64::total_cmp);
    }
}

fn accepted(buf: &[f64], n: usize, k: usize, ell: usize) -> bool {
    strings_valid(buf, n, k) && occupation_from_minima(buf, n, k) == ell
}

/// Hit fraction of interlaced draws with occupation number `ell`, divided by
/// `(k!)^n` for the within-string orderings.
pub fn volume_mc(n: usize, k: usize, ell: usize, samples: u64, seed: u64) -> Result<McEstimate> {
    check_volume_query(n, k, ell)?;
    if samples == 0 {
        return Err(BeadError::domain("need at least one sample"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(samples - c * CHUNK);
            let mut rng = rng_for(seed, c);
            let mut buf = vec![0.0; n * k];
            let mut w = Welford::default();
            for _ in 0..len {
                draw_strings(&mut rng, &mut buf, k);
                w.push(if accepted(&buf, n, k, ell) { 1.0 } else { 0.0 });
            }
            w
        })
        .collect();
    let w = parts.iter().fold(Welford::default(), |acc, p| acc.merge(p));
    let scale = (-(n as f64) * ln_factorial(k as u64)).exp();
    Ok(McEstimate {
        mean: w.mean * scale,
        std_error: w.std_error() * scale,
        samples,
        seed,
        hits: (w.mean * samples as f64).round() as u64,
        acceptance_rate: w.mean,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub config: BeadConfiguration,
    pub trials: u64,
    pub acceptance_rate: f64,
}

/// Uniform sample of the interlaced configurations with occupation number
/// `ell`, by rejection from independent uniform strings.
pub fn sample_uniform_config(n: usize, k: usize, ell: usize, seed: u64, budget: &Budget) -> Result<SampleOutcome> {
    check_volume_query(n, k, ell)?;
    if ell == 0 || ell == n {
        return Err(BeadError::domain(format!("no configurations with ell={ell} and k >= 1")));
    }
    let mut rng = rng_for(seed, 0);
    let mut buf = vec![0.0; n * k];
    for trial in 1..=budget.trials {
        draw_strings(&mut rng, &mut buf, k);
        if accepted(&buf, n, k, ell) {
            return Ok(SampleOutcome {
                config: BeadConfiguration::from_sorted_flat(n, k, buf),
                trials: trial,
                acceptance_rate: 1.0 / trial as f64,
            });
        }
    }
    Err(BeadError::Budget {
        what: "rejection trials",
        needed: budget.trials as u128 + 1,
        budget: budget.trials as u128,
        detail: Some(format!("measured acceptance rate 0/{}", budget.trials)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 / 7.0).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let (mut a, mut b) = (Welford::default(), Welford::default());
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let m = a.merge(&b);
        assert_eq!(m.count, all.count);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn two_strings_always_accept() {
        let e = volume_mc(2, 1, 1, 10_000, 3).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn reproducible_per_seed() {
        let a = volume_mc(3, 1, 2, 50_000, 11).unwrap();
        let b = volume_mc(3, 1, 2, 50_000, 11).unwrap();
        assert_eq!(a, b);
        assert!(volume_mc(3, 1, 2, 0, 11).is_err());
    }

    #[test]
    fn sampler_returns_valid_configurations() {
        let b = Budget::default();
        let s = sample_uniform_config(4, 2, 2, 5, &b).unwrap();
        assert!(s.config.is_valid());
        assert_eq!(s.config.occupation_number().unwrap(), 2);
        assert_eq!(sample_uniform_config(4, 2, 2, 5, &b).unwrap(), s);
        let tight = Budget { trials: 1, ..b };
        let hard = (0..20).map(|seed| sample_uniform_config(6, 3, 3, seed, &tight)).find(|r| r.is_err());
        assert!(matches!(hard, Some(Err(BeadError::Budget { .. }))));
    }
}
