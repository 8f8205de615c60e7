use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Mul, Neg};

/// A complex number stored as `(ln |z|, arg z)`.
///
/// Zero is `log_mod = -inf`. Phases are kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogComplex {
    pub log_mod: f64,
    pub phase: f64,
}

pub fn normalize_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    if p <= -PI {
        p += 2.0 * PI;
    }
    p
}

impl LogComplex {
    pub const ZERO: LogComplex = LogComplex {
        log_mod: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: LogComplex = LogComplex {
        log_mod: 0.0,
        phase: 0.0,
    };

    pub fn new(log_mod: f64, phase: f64) -> Self {
        if log_mod == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        LogComplex {
            log_mod,
            phase: normalize_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        Self::new(z.norm().ln(), z.arg())
    }

    /// Signed real `x` as a log value with phase 0 or pi.
    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogComplex::new(x.ln(), 0.0)
        } else {
            LogComplex::new((-x).ln(), PI)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mod == f64::NEG_INFINITY
    }

    pub fn to_complex(self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mod.exp(), self.phase)
    }

    /// `z^m` computed as `exp(m log z)`.
    pub fn powu(self, m: u64) -> Self {
        if m == 0 {
            return Self::ONE;
        }
        if self.is_zero() {
            return Self::ZERO;
        }
        let m = m as f64;
        LogComplex::new(self.log_mod * m, self.phase * m)
    }

    /// Multiply by the positive real `exp(shift)`.
    pub fn scale_log(self, shift: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        LogComplex {
            log_mod: self.log_mod + shift,
            phase: self.phase,
        }
    }

    /// Sum a slice with two passes: find the largest modulus, then add the
    /// terms rescaled by it.
    pub fn sum(terms: &[LogComplex]) -> LogComplex {
        let max = terms
            .iter()
            .map(|t| t.log_mod)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let acc: Complex64 = terms
            .iter()
            .filter(|t| !t.is_zero())
            .map(|t| Complex64::from_polar((t.log_mod - max).exp(), t.phase))
            .sum();
        LogComplex::from_complex(acc).scale_log(max)
    }

    /// Real part as a signed log value, plus `|Im| / |z|`.
    pub fn real_part(self) -> (LogComplex, f64) {
        if self.is_zero() {
            return (Self::ZERO, 0.0);
        }
        let (s, c) = self.phase.sin_cos();
        let re = if c == 0.0 {
            Self::ZERO
        } else {
            LogComplex::new(self.log_mod + c.abs().ln(), if c < 0.0 { PI } else { 0.0 })
        };
        (re, s.abs())
    }

    /// Value as a signed `f64`, assuming the phase is 0 or pi.
    pub fn to_real(self) -> f64 {
        self.to_complex().re
    }
}

impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        LogComplex::new(self.log_mod + rhs.log_mod, self.phase + rhs.phase)
    }
}

impl Neg for LogComplex {
    type Output = LogComplex;
    fn neg(self) -> LogComplex {
        if self.is_zero() {
            return self;
        }
        LogComplex::new(self.log_mod, self.phase + PI)
    }
}

/// `ln(m!)` by direct summation.
pub fn ln_factorial(m: u64) -> f64 {
    (2..=m).map(|i| (i as f64).ln()).sum()
}
