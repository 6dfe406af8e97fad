//! Collocation differentiation matrices.
//!
//! Latitude uses barycentric differentiation on Gauss-Legendre nodes;
//! longitude uses the periodic (Fourier) differentiation matrices for an
//! even number of uniform nodes.

use ndarray::Array2;

use crate::scalar::Real;

/// Barycentric interpolation weights for Gauss-Legendre nodes `x` with
/// quadrature weights `w`: lambda_j = (-1)^j sqrt((1 - x_j^2) w_j).
pub fn barycentric_weights_gauss<T: Real>(x: &[T], w: &[T]) -> Vec<T> {
    x.iter()
        .zip(w)
        .enumerate()
        .map(|(j, (&xj, &wj))| {
            let lam = ((T::one() - xj * xj) * wj).sqrt();
            if j.is_multiple_of(2) {
                lam
            } else {
                -lam
            }
        })
        .collect()
}

/// First-derivative collocation matrix for nodes `x` with barycentric
/// weights `lam`.
pub fn diff_matrix<T: Real>(x: &[T], lam: &[T]) -> Array2<T> {
    let n = x.len();
    let mut d = Array2::zeros((n, n));
    for i in 0..n {
        let mut diag = T::zero();
        for j in 0..n {
            if i != j {
                let v = (lam[j] / lam[i]) / (x[i] - x[j]);
                d[[i, j]] = v;
                diag = diag - v;
            }
        }
        d[[i, i]] = diag;
    }
    d
}

/// Second-derivative collocation matrix (Welfert's recursion from the
/// first-derivative matrix).
pub fn diff_matrix2<T: Real>(x: &[T], lam: &[T], d1: &Array2<T>) -> Array2<T> {
    let n = x.len();
    let mut d2 = Array2::zeros((n, n));
    for i in 0..n {
        let mut diag = T::zero();
        for j in 0..n {
            if i != j {
                let v = T::of(2.0) / (x[i] - x[j]) * ((lam[j] / lam[i]) * d1[[i, i]] - d1[[i, j]]);
                d2[[i, j]] = v;
                diag = diag - v;
            }
        }
        d2[[i, i]] = diag;
    }
    d2
}

/// First- and second-derivative matrices for `n` (even) uniform nodes on a
/// 2*pi-periodic interval.
pub fn fourier_diff_matrices<T: Real>(n: usize) -> (Array2<T>, Array2<T>) {
    assert!(n >= 2 && n.is_multiple_of(2), "periodic grid must be even");
    let h = T::of(2.0) * T::PI() / T::of(n as f64);
    let half = T::of(0.5);
    let mut d1 = Array2::zeros((n, n));
    let mut d2 = Array2::zeros((n, n));
    let diag2 = -T::PI() * T::PI() / (T::of(3.0) * h * h) - T::of(1.0 / 6.0);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                d2[[j, j]] = diag2;
                continue;
            }
            let delta = T::of(j as f64 - k as f64) * h * half;
            let sign = if (j + n - k).is_multiple_of(2) {
                T::one()
            } else {
                -T::one()
            };
            d1[[j, k]] = half * sign / delta.tan();
            d2[[j, k]] = -half * sign / (delta.sin() * delta.sin());
        }
    }
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gauss::gauss_legendre;

    #[test]
    fn gauss_collocation_derivatives_are_spectral() {
        let n = 24;
        let (x, w) = gauss_legendre::<f64>(n);
        let lam = barycentric_weights_gauss(&x, &w);
        let d1 = diff_matrix(&x, &lam);
        let d2 = diff_matrix2(&x, &lam, &d1);
        let f: Vec<f64> = x.iter().map(|&xi| (2.0 * xi).sin()).collect();
        for i in 0..n {
            let mut df = 0.0;
            let mut ddf = 0.0;
            for j in 0..n {
                df += d1[[i, j]] * f[j];
                ddf += d2[[i, j]] * f[j];
            }
            assert!((df - 2.0 * (2.0 * x[i]).cos()).abs() < 1e-10);
            assert!((ddf + 4.0 * (2.0 * x[i]).sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn fourier_matrices_differentiate_trig_modes() {
        let n = 32;
        let (d1, d2) = fourier_diff_matrices::<f64>(n);
        let phi: Vec<f64> = (0..n)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / n as f64)
            .collect();
        for k in [1usize, 3, 11] {
            let f: Vec<f64> = phi.iter().map(|&p| (k as f64 * p).cos()).collect();
            for i in 0..n {
                let mut df = 0.0;
                let mut ddf = 0.0;
                for j in 0..n {
                    df += d1[[i, j]] * f[j];
                    ddf += d2[[i, j]] * f[j];
                }
                let kf = k as f64;
                assert!((df + kf * (kf * phi[i]).sin()).abs() < 1e-10);
                assert!((ddf + kf * kf * (kf * phi[i]).cos()).abs() < 1e-9);
            }
        }
    }
}
