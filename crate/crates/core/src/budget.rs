//! Enumeration and sampling budgets.
//!
//! `BEAD_LAB_BUDGET` overrides the defaults. A bare integer sets every
//! enumeration and trial budget; `key=value` pairs separated by commas set
//! individual fields (`subsets`, `states`, `dense_states`, `trials`).

use crate::error::{BeadError, Result};
use serde::Serialize;

pub const ENV_VAR: &str = "BEAD_LAB_BUDGET";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Subset terms in a single volume sum.
    pub subsets: u64,
    /// States in a rate-matrix enumeration.
    pub states: u64,
    /// States in a dense matrix exponential.
    pub dense_states: u64,
    /// Rejection-sampling trials.
    pub trials: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            subsets: 100_000_000,
            states: 1_000_000,
            dense_states: 2_000,
            trials: 100_000_000,
        }
    }
}

impl Budget {
    pub fn from_env() -> Result<Self> {
        match std::env::var(ENV_VAR) {
            Ok(s) => Budget::parse(&s),
            Err(_) => Ok(Budget::default()),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut b = Budget::default();
        if let Ok(v) = s.parse::<u64>() {
            b.subsets = v;
            b.states = v;
            b.trials = v;
            b.dense_states = b.dense_states.min(v);
            return Ok(b);
        }
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| bad(s))?;
            let v: u64 = value.trim().parse().map_err(|_| bad(s))?;
            match key.trim() {
                "subsets" => b.subsets = v,
                "states" => b.states = v,
                "dense_states" => b.dense_states = v,
                "trials" => b.trials = v,
                _ => return Err(bad(s)),
            }
        }
        Ok(b)
    }

    pub fn check(what: &'static str, needed: u64, budget: u64) -> Result<()> {
        if needed > budget {
            return Err(BeadError::Budget {
                what,
                needed: needed as u128,
                budget: budget as u128,
                detail: None,
            });
        }
        Ok(())
    }
}

fn bad(s: &str) -> BeadError {
    BeadError::structural(format!(
        "cannot parse {ENV_VAR}={s:?}; expected an integer or key=value list"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_forms() {
        let b = Budget::parse("500").unwrap();
        assert_eq!((b.subsets, b.states, b.trials, b.dense_states), (500, 500, 500, 500));
        let b = Budget::parse("states=10, trials=7").unwrap();
        assert_eq!(b.states, 10);
        assert_eq!(b.trials, 7);
        assert_eq!(b.subsets, Budget::default().subsets);
        assert!(Budget::parse("widgets=3").is_err());
        assert!(Budget::parse("states").is_err());
    }
}
