//! Dense determinants and the uniformized matrix exponential.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Determinant of a dense complex matrix by partially pivoted LU.
pub fn det(m: DMatrix<Complex64>) -> Complex64 {
    if m.nrows() == 0 {
        return Complex64::new(1.0, 0.0);
    }
    m.lu().determinant()
}

/// `exp(Q t)` for a generator `Q` (non-negative off-diagonal, zero row sums).
///
/// Uniformization writes `exp(Q t) = exp(L t (P - I))` with `P = I + Q/L`
/// stochastic. The step `L t / 2^s <= 1/2` is expanded as a Poisson-weighted
/// power series of `P`, whose terms are all non-negative, then squared `s` times.
pub fn expm_generator(q: &DMatrix<f64>, t: f64) -> DMatrix<f64> {
    let dim = q.nrows();
    let rate = (0..dim).map(|i| -q[(i, i)]).fold(0.0f64, f64::max);
    if rate == 0.0 || t == 0.0 {
        return DMatrix::identity(dim, dim);
    }
    let p = DMatrix::identity(dim, dim) + q / rate;
    let x_total = rate * t;
    let squarings = if x_total > 0.5 {
        (x_total / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let x = x_total / 2f64.powi(squarings as i32);

    let mut weight = (-x).exp();
    let mut term = DMatrix::identity(dim, dim);
    let mut acc = &term * weight;
    let mut remaining = 1.0 - weight;
    let mut j = 0u32;
    while remaining > 1e-17 && j < 200 {
        j += 1;
        term = &term * &p;
        weight *= x / j as f64;
        acc += &term * weight;
        remaining -= weight;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_of_small_matrices() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 2.0),
                Complex64::new(3.0, 0.0),
                Complex64::new(4.0, 0.0),
            ],
        );
        assert!((det(m) - Complex64::new(4.0, -6.0)).norm() < 1e-14);
        assert_eq!(det(DMatrix::zeros(0, 0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn two_state_chain() {
        let (a, b) = (0.7, 1.9);
        let q = DMatrix::from_row_slice(2, 2, &[-a, a, b, -b]);
        for &t in &[0.01, 0.5, 3.0, 40.0] {
            let e = expm_generator(&q, t);
            let decay = (-(a + b) * t).exp();
            let p01 = a / (a + b) * (1.0 - decay);
            let p10 = b / (a + b) * (1.0 - decay);
            assert!((e[(0, 1)] - p01).abs() < 1e-13, "t={t}");
            assert!((e[(1, 0)] - p10).abs() < 1e-13, "t={t}");
            assert!((e[(0, 0)] + e[(0, 1)] - 1.0).abs() < 1e-13);
        }
    }
}
