//! Roots of `z^n = (-1)^theta2` with exactly reduced angles.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `exp(i pi num / n)`, reducing `num` modulo `2n` before touching floats.
pub fn unit_pi(num: i64, n: usize) -> Complex64 {
    let two_n = 2 * n as i64;
    let r = num.rem_euclid(two_n);
    // Fold into the first half-turn so both sin and cos see small arguments.
    let (r, flip) = if r >= n as i64 { (r - n as i64, true) } else { (r, false) };
    let z = if 2 * r == n as i64 {
        Complex64::new(0.0, 1.0)
    } else if r == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        let a = PI * r as f64 / n as f64;
        Complex64::new(a.cos(), a.sin())
    };
    if flip {
        -z
    } else {
        z
    }
}

/// The `n` solutions of `z^n = (-1)^theta2`, `z_j = exp(i pi (2j + theta2) / n)`.
#[derive(Debug, Clone)]
pub struct RootSystem {
    n: usize,
    theta2: u8,
    roots: Vec<Complex64>,
}

impl RootSystem {
    pub fn new(n: usize, theta2: u8) -> Self {
        assert!(n >= 1 && theta2 <= 1);
        let roots = (0..n)
            .map(|j| unit_pi(2 * j as i64 + theta2 as i64, n))
            .collect();
        RootSystem { n, theta2, roots }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta2(&self) -> u8 {
        self.theta2
    }

    pub fn roots(&self) -> &[Complex64] {
        &self.roots
    }

    /// Angle numerator of root `j` in units of `pi / n`.
    pub fn numerator(&self, j: usize) -> i64 {
        2 * j as i64 + self.theta2 as i64
    }

    /// `z_j^m` for any integer `m`, exact up to one evaluation of sin/cos.
    pub fn pow(&self, j: usize, m: i64) -> Complex64 {
        let two_n = 2 * self.n as i64;
        let num = (m.rem_euclid(two_n) * self.numerator(j)).rem_euclid(two_n);
        unit_pi(num, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_solve_their_equation() {
        for n in 1..=12 {
            for theta2 in 0..=1u8 {
                let rs = RootSystem::new(n, theta2);
                let target = if theta2 == 0 { 1.0 } else { -1.0 };
                for j in 0..n {
                    assert!((rs.pow(j, n as i64) - Complex64::new(target, 0.0)).norm() < 1e-15);
                    let direct = rs.roots()[j].powi(n as i32);
                    assert!((direct - Complex64::new(target, 0.0)).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn negative_powers_are_inverses() {
        let rs = RootSystem::new(7, 1);
        for j in 0..7 {
            for m in -20..20 {
                let p = rs.pow(j, m) * rs.pow(j, -m);
                assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(unit_pi(2, 4), Complex64::new(0.0, 1.0));
        assert_eq!(unit_pi(4, 4), Complex64::new(-1.0, 0.0));
        assert_eq!(unit_pi(-2, 4), Complex64::new(-0.0, -1.0));
    }
}
