//! Bead configurations on the semi-discrete torus `[0,1) x Z_n`.

use crate::error::{BeadError, Result};
use crate::ringset::{RingSet, MAX_N};
use serde::{Deserialize, Serialize};

/// Residue of `x` in `(0, 1]`: a bead sitting exactly at the query time is a
/// full turn away.
pub fn residue_open(x: f64) -> f64 {
    let r = x - x.floor();
    if r == 0.0 {
        1.0
    } else {
        r
    }
}

/// `n` strings with `k` beads each, stored string-major and sorted per string.
#[derive(Debug, Clone, PartialEq)]
pub struct BeadConfiguration {
    n: usize,
    k: usize,
    beads: Vec<f64>,
}

/// On-disk form; coordinates are decimal strings so inputs round-trip exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigJson {
    pub n: usize,
    pub k: usize,
    pub strings: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tilt {
    pub tau: f64,
    pub sum_p: f64,
    pub sum_q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jump {
    pub t: f64,
    /// The particle at `h` moves to `h+1`.
    pub h: usize,
}

/// Right-continuous piecewise-constant path of ring sets on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationPath {
    pub n: usize,
    pub initial: RingSet,
    /// Sorted by time. A bead at `t = 0` is recorded at `t = 1`, closing the loop.
    pub jumps: Vec<Jump>,
}

impl BeadConfiguration {
    pub fn new(n: usize, k: usize, strings: Vec<Vec<f64>>) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return Err(BeadError::structural(format!("n={n} outside 2..={MAX_N}")));
        }
        if strings.len() != n {
            return Err(BeadError::structural(format!(
                "expected {n} strings, got {}",
                strings.len()
            )));
        }
        let mut beads = Vec::with_capacity(n * k);
        for (h, mut s) in strings.into_iter().enumerate() {
            if s.len() != k {
                return Err(BeadError::structural(format!(
                    "string {h} has {} beads, expected {k}",
                    s.len()
                )));
            }
            if let Some(t) = s.iter().find(|t| !(0.0..1.0).contains(*t)) {
                return Err(BeadError::structural(format!(
                    "coordinate {t} on string {h} is outside [0,1)"
                )));
            }
            s.sort_by(f64::total_cmp);
            beads.extend(s);
        }
        Ok(BeadConfiguration { n, k, beads })
    }

    /// Build from a flat string-major buffer whose strings are already sorted.
    pub fn from_sorted_flat(n: usize, k: usize, beads: Vec<f64>) -> Self {
        debug_assert_eq!(beads.len(), n * k);
        BeadConfiguration { n, k, beads }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: ConfigJson = serde_json::from_str(text)
            .map_err(|e| BeadError::structural(format!("configuration JSON: {e}")))?;
        let strings = raw
            .strings
            .iter()
            .map(|s| {
                s.iter()
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|_| {
                            BeadError::structural(format!("coordinate {t:?} is not a decimal"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        BeadConfiguration::new(raw.n, raw.k, strings)
    }

    pub fn to_json(&self) -> ConfigJson {
        ConfigJson {
            n: self.n,
            k: self.k,
            strings: (0..self.n)
                .map(|h| self.string(h).iter().map(|t| format!("{t}")).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn string(&self, h: usize) -> &[f64] {
        &self.beads[h * self.k..(h + 1) * self.k]
    }

    pub fn beads(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        (0..self.n).flat_map(move |h| self.string(h).iter().map(move |&t| (t, h)))
    }

    /// Interlacing between every pair of neighbouring strings, with all
    /// coordinates distinct.
    pub fn is_valid(&self) -> bool {
        strings_valid(&self.beads, self.n, self.k)
    }

    fn require_valid(&self) -> Result<()> {
        if self.k == 0 {
            return Err(BeadError::domain(
                "occupation is undefined for a configuration without beads",
            ));
        }
        if !self.is_valid() {
            return Err(BeadError::domain("configuration is not interlaced"));
        }
        Ok(())
    }

    /// Number of strings whose first bead precedes the first bead of the
    /// string below.
    pub fn occupation_number(&self) -> Result<usize> {
        self.require_valid()?;
        let ell = occupation_from_minima(&self.beads, self.n, self.k);
        if ell == 0 || ell == self.n {
            return Err(BeadError::Numerical(format!(
                "occupation number {ell} outside 1..n-1"
            )));
        }
        Ok(ell)
    }

    /// Occupied strings at time `t`: `h` is occupied when the next bead on `h`
    /// comes before the next bead on `h-1`.
    pub fn occupied_at(&self, t: f64) -> RingSet {
        let next = |h: usize| {
            self.string(h)
                .iter()
                .map(|&s| residue_open(s - t))
                .fold(f64::INFINITY, f64::min)
        };
        let gaps: Vec<f64> = (0..self.n).map(next).collect();
        let members = (0..self.n)
            .filter(|&h| gaps[h] < gaps[(h + self.n - 1) % self.n])
            .map(|h| h as i64);
        RingSet::from_members(self.n, members).expect("n already checked")
    }

    pub fn occupation_path(&self) -> Result<OccupationPath> {
        self.require_valid()?;
        let mut jumps: Vec<Jump> = self
            .beads()
            .map(|(t, h)| Jump {
                t: if t == 0.0 { 1.0 } else { t },
                h,
            })
            .collect();
        jumps.sort_by(|a, b| a.t.total_cmp(&b.t));
        let path = OccupationPath {
            n: self.n,
            initial: self.occupied_at(0.0),
            jumps,
        };
        path.check()?;
        Ok(path)
    }

    /// Ratio of summed up-string gaps to summed same-string gaps.
    pub fn tilt(&self) -> Result<Tilt> {
        self.require_valid()?;
        let (mut sum_p, mut sum_q) = (0.0, 0.0);
        for h in 0..self.n {
            let s = self.string(h);
            let above = self.string((h + 1) % self.n);
            for (j, &t) in s.iter().enumerate() {
                sum_p += if j + 1 < s.len() {
                    s[j + 1] - t
                } else {
                    residue_open(s[0] - t)
                };
                sum_q += above
                    .iter()
                    .map(|&u| residue_open(u - t))
                    .fold(f64::INFINITY, f64::min);
            }
        }
        Ok(Tilt {
            tau: sum_q / sum_p,
            sum_p,
            sum_q,
        })
    }

    /// `t -> (1 - t) mod 1` on every bead.
    pub fn reflect(&self) -> BeadConfiguration {
        self.map_coordinates(|t| if t == 0.0 { 0.0 } else { 1.0 - t })
    }

    /// `t -> (t + c) mod 1` on every bead.
    pub fn rotate(&self, c: f64) -> BeadConfiguration {
        self.map_coordinates(|t| {
            let r = (t + c).rem_euclid(1.0);
            if r >= 1.0 {
                0.0
            } else {
                r
            }
        })
    }

    fn map_coordinates(&self, f: impl Fn(f64) -> f64) -> BeadConfiguration {
        let mut beads: Vec<f64> = self.beads.iter().map(|&t| f(t)).collect();
        if self.k > 0 {
            for chunk in beads.chunks_mut(self.k) {
                chunk.sort_by(f64::total_cmp);
            }
        }
        BeadConfiguration {
            n: self.n,
            k: self.k,
            beads,
        }
    }
}

impl OccupationPath {
    /// `X_t` for `t` in `[0, 1]`.
    pub fn state_at(&self, t: f64) -> RingSet {
        let mut x = self.initial;
        for j in self.jumps.iter().take_while(|j| j.t <= t) {
            x = x.jump(j.h).expect("path checked at construction");
        }
        x
    }

    pub fn occupation_number(&self) -> usize {
        self.initial.len()
    }

    /// Every jump is legal and the loop closes at `t = 1`.
    pub fn check(&self) -> Result<()> {
        let mut x = self.initial;
        for j in &self.jumps {
            x = x.jump(j.h).ok_or_else(|| {
                BeadError::Numerical(format!(
                    "illegal jump from {} at t={} in state {x:?}",
                    j.h, j.t
                ))
            })?;
        }
        if x != self.initial {
            return Err(BeadError::Numerical(format!(
                "path does not close: {:?} -> {x:?}",
                self.initial
            )));
        }
        Ok(())
    }
}

/// Interlacing of two sorted strings of equal length, strict in both chains.
pub fn pair_interlaced(a: &[f64], b: &[f64]) -> bool {
    let k = a.len();
    if k == 0 {
        return true;
    }
    let (first, second) = if a[0] < b[0] { (a, b) } else { (b, a) };
    for j in 0..k {
        if !(first[j] < second[j]) {
            return false;
        }
        if j + 1 < k && !(second[j] < first[j + 1]) {
            return false;
        }
    }
    true
}

/// Full validity test on a flat, per-string-sorted buffer.
pub fn strings_valid(beads: &[f64], n: usize, k: usize) -> bool {
    if k == 0 {
        return true;
    }
    for h in 0..n {
        let a = &beads[h * k..(h + 1) * k];
        let g = (h + 1) % n;
        let b = &beads[g * k..(g + 1) * k];
        if !pair_interlaced(a, b) {
            return false;
        }
    }
    let mut all = beads.to_vec();
    all.sort_by(f64::total_cmp);
    all.windows(2).all(|w| w[0] < w[1])
}

/// `#{h : first bead on h < first bead on h-1}` on a flat sorted buffer.
pub fn occupation_from_minima(beads: &[f64], n: usize, k: usize) -> usize {
    (0..n)
        .filter(|&h| beads[h * k] < beads[((h + n - 1) % n) * k])
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, s: &[&[f64]]) -> BeadConfiguration {
        BeadConfiguration::new(n, k, s.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn validity_examples() {
        assert!(cfg(2, 0, &[&[], &[]]).is_valid());
        assert!(cfg(2, 1, &[&[0.2], &[0.5]]).is_valid());
        assert!(!cfg(3, 2, &[&[0.1, 0.2], &[0.5, 0.6], &[0.7, 0.8]]).is_valid());
    }

    #[test]
    fn structural_errors_are_not_verdicts() {
        assert!(BeadConfiguration::new(2, 1, vec![vec![0.2], vec![]]).is_err());
        assert!(BeadConfiguration::new(2, 1, vec![vec![0.2], vec![1.0]]).is_err());
        assert!(BeadConfiguration::new(2, 1, vec![vec![0.2]]).is_err());
        assert!(BeadConfiguration::new(1, 0, vec![vec![]]).is_err());
    }

    #[test]
    fn ties_are_rejected() {
        assert!(!cfg(3, 1, &[&[0.2], &[0.5], &[0.2]]).is_valid());
    }

    #[test]
    fn two_string_example() {
        let c = cfg(2, 1, &[&[0.2], &[0.5]]);
        assert_eq!(c.occupation_number().unwrap(), 1);
        let path = c.occupation_path().unwrap();
        assert_eq!(path.initial.to_vec(), vec![0]);
        assert_eq!(path.jumps, vec![Jump { t: 0.2, h: 0 }, Jump { t: 0.5, h: 1 }]);
        let tilt = c.tilt().unwrap();
        assert!((tilt.tau - 0.5).abs() < 1e-15);
        assert!((tilt.sum_q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn staircase_has_one_occupied_string() {
        let c = cfg(3, 1, &[&[0.1], &[0.2], &[0.3]]);
        assert_eq!(c.occupation_number().unwrap(), 1);
        assert_eq!(c.occupation_path().unwrap().occupation_number(), 1);
        assert_eq!(c.reflect().occupation_number().unwrap(), 2);
    }

    #[test]
    fn empty_configuration_has_no_occupation_number() {
        assert!(cfg(2, 0, &[&[], &[]]).occupation_number().is_err());
    }

    #[test]
    fn bead_at_time_zero_closes_loop() {
        let c = cfg(2, 1, &[&[0.0], &[0.5]]);
        let path = c.occupation_path().unwrap();
        assert_eq!(path.initial.to_vec(), vec![1]);
        assert_eq!(path.jumps.last().unwrap().t, 1.0);
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"n":2,"k":1,"strings":[["0.2"],["0.5"]]}"#;
        let c = BeadConfiguration::from_json(text).unwrap();
        assert_eq!(c, cfg(2, 1, &[&[0.2], &[0.5]]));
        let back = serde_json::to_string(&c.to_json()).unwrap();
        assert_eq!(BeadConfiguration::from_json(&back).unwrap(), c);
        assert!(BeadConfiguration::from_json(r#"{"n":2,"k":1,"strings":[["x"],["0.5"]]}"#).is_err());
    }
}
