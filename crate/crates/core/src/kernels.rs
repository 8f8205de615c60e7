//! Correlation kernels on the torus and on `R x Z_n`, mixed correlation
//! determinants, and numerical checks of the operator identities.

use crate::error::{BeadError, Result};
use crate::fredholm::check_not_pole;
use crate::linalg::det;
use crate::roots::RootSystem;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Bead, occupied or unoccupied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    B,
    O,
    U,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::B, Flavor::O, Flavor::U];

    fn sign(self) -> f64 {
        if self == Flavor::O {
            -1.0
        } else {
            1.0
        }
    }

    fn bead_shift(self) -> i64 {
        i64::from(self == Flavor::B)
    }
}

impl FromStr for Flavor {
    type Err = BeadError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b" => Ok(Flavor::B),
            "o" => Ok(Flavor::O),
            "u" => Ok(Flavor::U),
            _ => Err(BeadError::structural(format!("flavor {s:?} is not one of b, o, u"))),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::B => "b",
            Flavor::O => "o",
            Flavor::U => "u",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPoint {
    pub flavor: Flavor,
    pub t: f64,
    pub h: i64,
}

impl KernelPoint {
    pub fn new(flavor: Flavor, t: f64, h: i64) -> Self {
        KernelPoint { flavor, t, h }
    }
}

/// A translation-invariant kernel `H_alpha(t, h)`.
pub trait CorrelationKernel {
    fn eval(&self, flavor: Flavor, t: f64, h: i64) -> Result<Complex64>;
}

/// `[t]_alpha = t + 1{t < 0} + 1{alpha = o} 1{t = 0}`.
pub fn bracket(flavor: Flavor, t: f64) -> f64 {
    let mut x = t;
    if t < 0.0 {
        x += 1.0;
    }
    if flavor == Flavor::O && t == 0.0 {
        x += 1.0;
    }
    x
}

/// Torus kernel parameters with precomputed roots and denominators.
#[derive(Debug, Clone)]
pub struct TorusKernelParams {
    pub n: usize,
    pub beta: Complex64,
    pub theta2: u8,
    pub t: Complex64,
    roots: RootSystem,
    /// `beta + T z` per root.
    rates: Vec<Complex64>,
    /// `1 - exp(-(beta + T z))` per root.
    denoms: Vec<Complex64>,
}

impl TorusKernelParams {
    pub fn new(n: usize, beta: Complex64, theta2: u8, t: Complex64) -> Result<Self> {
        if n == 0 || theta2 > 1 {
            return Err(BeadError::domain(format!("need n >= 1 and theta2 in {{0,1}}, got n={n}, theta2={theta2}")));
        }
        let roots = RootSystem::new(n, theta2);
        let rates: Vec<Complex64> = roots.roots().iter().map(|&z| beta + t * z).collect();
        for r in &rates {
            check_not_pole(*r, "beta + T z")?;
        }
        let denoms = rates.iter().map(|&r| 1.0 - (-r).exp()).collect();
        Ok(TorusKernelParams {
            n,
            beta,
            theta2,
            t,
            roots,
            rates,
            denoms,
        })
    }

    /// `(1/n) sum_z z^{m} exp(-(beta + T z) x) / (1 - exp(-(beta + T z)))`.
    fn root_sum(&self, m: i64, x: f64) -> Complex64 {
        let total: Complex64 = (0..self.n)
            .map(|j| self.roots.pow(j, m) * (-self.rates[j] * x).exp() / self.denoms[j])
            .sum();
        total / self.n as f64
    }

    pub fn kernel_torus(&self, flavor: Flavor, t: f64, h: i64) -> Result<Complex64> {
        if !(t > -1.0 && t < 1.0) {
            return Err(BeadError::domain(format!("torus kernel time {t} outside (-1,1)")));
        }
        let tb = if flavor == Flavor::B { self.t } else { Complex64::new(1.0, 0.0) };
        Ok(self.root_sum(flavor.bead_shift() - h, bracket(flavor, t)) * tb * flavor.sign())
    }
}

impl CorrelationKernel for TorusKernelParams {
    fn eval(&self, flavor: Flavor, t: f64, h: i64) -> Result<Complex64> {
        self.kernel_torus(flavor, t, h)
    }
}

/// Kernel of the stationary ring process with `ell` occupied strings out of `n`.
#[derive(Debug, Clone)]
pub struct RingKernelParams {
    pub n: usize,
    pub ell: usize,
    pub theta2: u8,
    roots: RootSystem,
    left: Vec<usize>,
    right: Vec<usize>,
}

/// Split the roots of `z^n = (-1)^theta2`, `theta2 = (n + ell + 1) mod 2`,
/// into the `ell` with least real part and the rest. Returns root indices.
fn split_roots(n: usize, ell: usize) -> Result<(RootSystem, Vec<usize>, Vec<usize>)> {
    if n < 2 || ell == 0 || ell >= n {
        return Err(BeadError::domain(format!("need 1 <= ell <= n-1, got n={n}, ell={ell}")));
    }
    let theta2 = ((n + ell + 1) % 2) as u8;
    let roots = RootSystem::new(n, theta2);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| roots.roots()[a].re.total_cmp(&roots.roots()[b].re));
    let gap = roots.roots()[order[ell]].re - roots.roots()[order[ell - 1]].re;
    assert!(gap > 1e-12, "tie in real parts splitting n={n}, ell={ell}");
    let mut left = order[..ell].to_vec();
    let mut right = order[ell..].to_vec();
    left.sort_unstable();
    right.sort_unstable();
    Ok((roots, left, right))
}

/// The `ell` roots of least real part and their complement, as complex values.
pub fn root_sets(n: usize, ell: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let (roots, left, right) = split_roots(n, ell)?;
    let pick = |idx: &[usize]| idx.iter().map(|&j| roots.roots()[j]).collect();
    Ok((pick(&left), pick(&right)))
}

impl RingKernelParams {
    pub fn new(n: usize, ell: usize) -> Result<Self> {
        let (roots, left, right) = split_roots(n, ell)?;
        Ok(RingKernelParams {
            n,
            ell,
            theta2: roots.theta2(),
            roots,
            left,
            right,
        })
    }

    fn side_sum(&self, side: &[usize], m: i64, s: f64) -> Complex64 {
        let total: Complex64 = side
            .iter()
            .map(|&j| self.roots.pow(j, m) * (-self.roots.roots()[j] * s).exp())
            .sum();
        total / self.n as f64
    }

    /// Right-hand branch, used for `s > 0` and for `s = 0` with `alpha != o`.
    pub fn right_branch(&self, flavor: Flavor, s: f64, h: i64) -> Complex64 {
        self.side_sum(&self.right, flavor.bead_shift() - h, s) * flavor.sign()
    }

    /// Left-hand branch, used for `s < 0` and for `s = 0` with `alpha = o`.
    pub fn left_branch(&self, flavor: Flavor, s: f64, h: i64) -> Complex64 {
        -self.side_sum(&self.left, flavor.bead_shift() - h, s) * flavor.sign()
    }

    pub fn kernel_ring(&self, flavor: Flavor, s: f64, h: i64) -> Complex64 {
        if s > 0.0 || (s == 0.0 && flavor != Flavor::O) {
            self.right_branch(flavor, s, h)
        } else {
            self.left_branch(flavor, s, h)
        }
    }

    /// `H(0+, h) - H(0-, h)`, which should be `(-1)^{1{alpha=o}} 1{h = 1{alpha=b}}`.
    pub fn kernel_jump(&self, flavor: Flavor, h: i64) -> Complex64 {
        self.right_branch(flavor, 0.0, h) - self.left_branch(flavor, 0.0, h)
    }
}

impl CorrelationKernel for RingKernelParams {
    fn eval(&self, flavor: Flavor, t: f64, h: i64) -> Result<Complex64> {
        Ok(self.kernel_ring(flavor, t, h))
    }
}

/// `det_{i,j} H_{alpha_i}(y_j - y_i)` using raw coordinate differences.
pub fn mixed_correlation<K: CorrelationKernel>(points: &[KernelPoint], kernel: &K) -> Result<Complex64> {
    if points.is_empty() {
        return Err(BeadError::domain("mixed correlation needs at least one point"));
    }
    let len = points.len();
    let mut m = DMatrix::zeros(len, len);
    for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            m[(i, j)] = kernel.eval(p.flavor, q.t - p.t, q.h - p.h)?;
        }
    }
    Ok(det(m))
}

/// Max entry of `J + T J C - C` on an `M`-point grid per string, with the
/// inner integral taken by the midpoint rule.
pub fn verify_inversion(p: &TorusKernelParams, grid: usize) -> Result<f64> {
    if grid < 8 {
        return Err(BeadError::domain(format!("grid size {grid} below 8")));
    }
    check_not_pole(p.beta, "beta")?;
    let n = p.n;
    let c_denom = 1.0 - (-p.beta).exp();
    let points = |offset: f64| -> Vec<KernelPoint> {
        let mut v = Vec::with_capacity(3 * n * grid);
        for &f in &Flavor::ALL {
            for h in 0..n {
                for a in 0..grid {
                    v.push(KernelPoint::new(f, (a as f64 + offset) / grid as f64, h as i64));
                }
            }
        }
        v
    };
    let eval_pts = points(0.0);
    let quad_pts = points(0.5);

    let j_op = |w: &KernelPoint, v: &KernelPoint| -> Complex64 {
        let d = v.t - w.t;
        p.root_sum(w.flavor.bead_shift() - v.h + w.h, bracket(w.flavor, d)) * w.flavor.sign()
    };
    let c_op = |w: &KernelPoint, v: &KernelPoint| -> Complex64 {
        let target = (w.h + w.flavor.bead_shift()).rem_euclid(n as i64);
        if v.h != target {
            return Complex64::new(0.0, 0.0);
        }
        let mut sign = w.flavor.sign();
        if w.flavor == Flavor::B && v.h == 0 && p.theta2 == 1 {
            sign = -sign;
        }
        (-p.beta * bracket(w.flavor, v.t - w.t)).exp() / c_denom * sign
    };
    let build = |rows: &[KernelPoint], cols: &[KernelPoint], f: &dyn Fn(&KernelPoint, &KernelPoint) -> Complex64| {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| f(&rows[i], &cols[j]))
    };
    let j_ee = build(&eval_pts, &eval_pts, &j_op);
    let c_ee = build(&eval_pts, &eval_pts, &c_op);
    let j_eq = build(&eval_pts, &quad_pts, &j_op);
    let c_qe = build(&quad_pts, &eval_pts, &c_op);
    let weight = p.t / grid as f64;
    let residual = j_ee + (j_eq * c_qe) * weight - c_ee;
    Ok(residual.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StreamCheck {
    pub nodes: usize,
    pub closed_form: Complex64,
    pub error: f64,
    pub error_doubled: f64,
}

/// Quadrature check of
/// `int_0^1 e^{-l[s-t]}/(1-e^{-l}) e^{-l'[t'-s]}/(1-e^{-l'}) ds
///  = (e^{-l'[t'-t]}/(1-e^{-l'}) - e^{-l[t'-t]}/(1-e^{-l})) / (l - l')`
/// by composite trapezoid on the smooth pieces between `t` and `t'`.
pub fn stream_check(lam: Complex64, lam2: Complex64, t: f64, t2: f64, nodes: usize) -> Result<StreamCheck> {
    check_not_pole(lam, "lambda")?;
    check_not_pole(lam2, "lambda'")?;
    if (lam - lam2).norm() < 1e-12 {
        return Err(BeadError::domain("the two rates must differ"));
    }
    let d1 = 1.0 - (-lam).exp();
    let d2 = 1.0 - (-lam2).exp();
    let closed = {
        let d = bracket(Flavor::U, t2 - t);
        ((-lam2 * d).exp() / d2 - (-lam * d).exp() / d1) / (lam - lam2)
    };
    let quad = |total: usize| -> Complex64 {
        let mut cuts = vec![0.0, t, t2, 1.0];
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut acc = Complex64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a {
                continue;
            }
            let mid = 0.5 * (a + b);
            let wrap1 = if mid < t { 1.0 } else { 0.0 };
            let wrap2 = if mid > t2 { 1.0 } else { 0.0 };
            let f = |s: f64| {
                (-lam * (s - t + wrap1)).exp() / d1 * (-lam2 * (t2 - s + wrap2)).exp() / d2
            };
            let pieces = ((total as f64) * (b - a)).ceil().max(1.0) as usize;
            let hstep = (b - a) / pieces as f64;
            let mut s = 0.5 * (f(a) + f(b));
            for i in 1..pieces {
                s += f(a + i as f64 * hstep);
            }
            acc += s * hstep;
        }
        acc
    };
    Ok(StreamCheck {
        nodes,
        closed_form: closed,
        error: (quad(nodes) - closed).norm(),
        error_doubled: (quad(2 * nodes) - closed).norm(),
    })
}

/// `H_alpha(s, h)` of the ring kernel at tilt `tau` for each `n`, with
/// `ell = floor(tau n)`. Diagnostic only.
pub fn ring_kernel_probe(tau: f64, flavor: Flavor, s: f64, h: i64, n_list: &[usize]) -> Result<Vec<(usize, Complex64)>> {
    n_list
        .iter()
        .map(|&n| {
            let ell = (tau * n as f64).floor() as usize;
            let p = RingKernelParams::new(n, ell)?;
            Ok((n, p.kernel_ring(flavor, s, h)))
        })
        .collect()
}
