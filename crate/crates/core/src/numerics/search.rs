//! Golden-section maximization of a unimodal scalar function.

use crate::scalar::Real;

/// Maximize a unimodal `f` on [a, b]; returns (argmax, max).
pub fn golden_section_max<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, xtol: T) -> (T, T) {
    let inv_phi = T::of(0.618_033_988_749_894_9);
    let mut lo = a;
    let mut hi = b;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let x = (lo + hi) * T::of(0.5);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_peak() {
        let f = |x: f64| -(x - 0.3).powi(2) + 2.0;
        let (x, v) = golden_section_max(&f, -1.0, 2.0, 1e-12);
        // location is comparison-limited to ~sqrt(eps); the value is exact
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 2.0).abs() < 1e-14);
    }
}
