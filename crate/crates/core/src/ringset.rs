use crate::error::{BeadError, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

pub const MAX_N: usize = 63;

/// A subset of `Z_n` stored as a bitmask, `n <= 63`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RingSet {
    n: u8,
    bits: u64,
}

impl RingSet {
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(RingSet { n: n as u8, bits: 0 })
    }

    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(RingSet {
            n: n as u8,
            bits: low_mask(n),
        })
    }

    pub fn from_bits(n: usize, bits: u64) -> Result<Self> {
        check_n(n)?;
        if bits & !low_mask(n) != 0 {
            return Err(BeadError::structural(format!(
                "bitmask {bits:#x} has members outside Z_{n}"
            )));
        }
        Ok(RingSet { n: n as u8, bits })
    }

    /// Members are reduced mod `n`; duplicates are an error.
    pub fn from_members<I: IntoIterator<Item = i64>>(n: usize, members: I) -> Result<Self> {
        let mut s = RingSet::empty(n)?;
        for m in members {
            let h = m.rem_euclid(n as i64) as usize;
            if s.contains(h) {
                return Err(BeadError::structural(format!("repeated member {h} in ring set")));
            }
            s.bits |= 1 << h;
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, h: usize) -> bool {
        h < self.n() && self.bits >> h & 1 == 1
    }

    pub fn succ(&self, h: usize) -> usize {
        (h + 1) % self.n()
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        let bits = self.bits;
        (0..self.n()).filter(move |&h| bits >> h & 1 == 1)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members().collect()
    }

    /// Move the particle at `h` to `h+1`. Requires `h` occupied and `h+1` vacant.
    pub fn jump(&self, h: usize) -> Option<RingSet> {
        let to = self.succ(h);
        if self.contains(h) && !self.contains(to) {
            Some(RingSet {
                n: self.n,
                bits: (self.bits & !(1 << h)) | (1 << to),
            })
        } else {
            None
        }
    }

    /// Sites `h` that can currently jump to `h+1`.
    pub fn movable(&self) -> impl Iterator<Item = usize> + '_ {
        self.members().filter(move |&h| !self.contains(self.succ(h)))
    }

    /// Position of this set among all `|self|`-subsets in colex order.
    pub fn colex_rank(&self) -> u64 {
        colex_rank(self.bits)
    }
}

impl fmt::Debug for RingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, h) in self.members().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}/Z_{}", self.n)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(BeadError::structural(format!(
            "ring size n={n} outside 1..={MAX_N}"
        )));
    }
    Ok(())
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Next bitmask with the same popcount (Gosper's hack).
pub fn next_colex(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x.wrapping_add(c);
    (((r ^ x) >> 2) / c) | r
}

pub fn colex_rank(bits: u64) -> u64 {
    let mut rank = 0;
    let mut i = 1;
    let mut b = bits;
    while b != 0 {
        let c = b.trailing_zeros() as u64;
        rank += binomial(c, i);
        i += 1;
        b &= b - 1;
    }
    rank
}

/// Inverse of [`colex_rank`] for `k`-subsets.
pub fn colex_unrank(mut rank: u64, k: u32) -> u64 {
    let mut bits = 0u64;
    for i in (1..=k as u64).rev() {
        let mut c = i - 1;
        while binomial(c + 1, i) <= rank {
            c += 1;
        }
        rank -= binomial(c, i);
        bits |= 1 << c;
    }
    bits
}

/// All `k`-subsets of `Z_n` in colex order.
pub fn subsets(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let total = binomial(n as u64, k as u64);
    let first = if k == 0 { 0 } else { (1u64 << k) - 1 };
    let mut cur = first;
    (0..total).map(move |i| {
        if i > 0 {
            cur = next_colex(cur);
        }
        cur
    })
}

/// All `k`-subsets of `Z_n` as ring sets, in colex order.
pub fn ring_sets(n: usize, k: usize) -> Result<Vec<RingSet>> {
    check_n(n)?;
    if k > n {
        return Ok(Vec::new());
    }
    Ok(subsets(n, k)
        .map(|bits| RingSet { n: n as u8, bits })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(63, 31), 916_312_070_471_295_267);
    }

    #[test]
    fn colex_roundtrip() {
        for (r, bits) in subsets(9, 4).enumerate() {
            assert_eq!(bits.count_ones(), 4);
            assert_eq!(colex_rank(bits), r as u64);
            assert_eq!(colex_unrank(r as u64, 4), bits);
        }
        assert_eq!(subsets(9, 4).count(), 126);
        assert_eq!(subsets(4, 0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn jumps_respect_exclusion() {
        let e = RingSet::from_members(5, [0, 1, 3]).unwrap();
        assert_eq!(e.movable().collect::<Vec<_>>(), vec![1, 3]);
        assert!(e.jump(0).is_none());
        assert_eq!(e.jump(3).unwrap().to_vec(), vec![0, 1, 4]);
        let wrap = RingSet::from_members(3, [2]).unwrap();
        assert_eq!(wrap.jump(2).unwrap().to_vec(), vec![0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(RingSet::from_members(4, [1, 5]).is_err());
        assert!(RingSet::empty(64).is_err());
        assert!(RingSet::from_bits(3, 0b1000).is_err());
    }
}
