//! Gauss-Legendre quadrature rules on [-1, 1].

use crate::scalar::Real;

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule.
///
/// Newton iteration on the Legendre recurrence; the rule integrates
/// polynomials of degree <= 2n-1 exactly.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 2, "Gauss-Legendre rule needs at least two nodes");
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = T::of(n as f64);
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess, then Newton.
        let guess = ((T::of(i as f64) + T::of(0.75)) * T::PI() / (nf + T::of(0.5))).cos();
        let mut x = guess;
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::epsilon() * (T::one() + x.abs()) {
                break;
            }
        }
        let w = T::of(2.0) / ((T::one() - x * x) * dp * dp);
        // guess descends from +1; store ascending
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        let (_, d) = legendre_with_derivative(n, T::zero());
        nodes[mid] = T::zero();
        weights[mid] = T::of(2.0) / (d * d);
    }
    (nodes, weights)
}

/// (P_n(x), P_n'(x)) via the three-term recurrence.
fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = T::of(k as f64);
        let p2 = ((T::of(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = T::of(n as f64) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Nodes and weights of the n-point rule mapped onto [a, b].
pub fn gauss_legendre_on<T: Real>(n: usize, a: T, b: T) -> (Vec<T>, Vec<T>) {
    let (x, w) = gauss_legendre::<T>(n);
    let half = T::of(0.5);
    let mid = half * (a + b);
    let rad = half * (b - a);
    let nodes = x.iter().map(|&xi| mid + rad * xi).collect();
    let weights = w.iter().map(|&wi| rad * wi).collect();
    (nodes, weights)
}
