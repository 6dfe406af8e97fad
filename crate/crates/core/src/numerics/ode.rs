//! Embedded Dormand-Prince 5(4) integration for scalar initial value
//! problems with adaptive step control.

use crate::scalar::Real;

/// Integrate `dy/dt = f(t, y)` from `(t0, y0)` to `t1 >= t0`.
///
/// Classic RK45 with a PI-free step controller: the step is accepted when
/// the embedded error estimate stays below `rtol*|y| + atol`.
pub fn integrate_to<T: Real, F: Fn(T, T) -> T>(f: &F, t0: T, y0: T, t1: T, rtol: T, atol: T) -> T {
    let mut t = t0;
    let mut y = y0;
    if t1 <= t0 {
        return y0;
    }
    let mut h = ((t1 - t0) * T::of(1e-3)).min(t1 - t0);
    let h_min = (t1 - t0) * T::of(1e-14);
    let safety = T::of(0.9);
    let mut steps = 0usize;
    while t < t1 {
        if t + h > t1 {
            h = t1 - t;
        }
        let (y5, err) = dopri_step(f, t, y, h);
        let tol = rtol * y5.abs().max(y.abs()) + atol;
        if err <= tol || h <= h_min {
            t = t + h;
            y = y5;
        }
        // order-5 controller
        let ratio = if err > T::zero() {
            safety * (tol / err).powf(T::of(0.2))
        } else {
            T::of(5.0)
        };
        h = h * ratio.clamp(T::of(0.2), T::of(5.0));
        h = h.max(h_min);
        steps += 1;
        if steps > 2_000_000 {
            break;
        }
    }
    y
}

/// Evaluate the solution at each of `targets`, which must be sorted
/// ascending and start at or after `t0`. One monotone sweep.
pub fn integrate_to_each<T: Real, F: Fn(T, T) -> T>(
    f: &F,
    t0: T,
    y0: T,
    targets: &[T],
    rtol: T,
    atol: T,
) -> Vec<T> {
    let mut out = Vec::with_capacity(targets.len());
    let mut t = t0;
    let mut y = y0;
    for &target in targets {
        y = integrate_to(f, t, y, target, rtol, atol);
        t = t.max(target);
        out.push(y);
    }
    out
}

/// One Dormand-Prince 5(4) step; returns (5th-order solution, error estimate).
fn dopri_step<T: Real, F: Fn(T, T) -> T>(f: &F, t: T, y: T, h: T) -> (T, T) {
    let c = |v: f64| T::of(v);
    let k1 = f(t, y);
    let k2 = f(t + h * c(1.0 / 5.0), y + h * (c(1.0 / 5.0) * k1));
    let k3 = f(
        t + h * c(3.0 / 10.0),
        y + h * (c(3.0 / 40.0) * k1 + c(9.0 / 40.0) * k2),
    );
    let k4 = f(
        t + h * c(4.0 / 5.0),
        y + h * (c(44.0 / 45.0) * k1 - c(56.0 / 15.0) * k2 + c(32.0 / 9.0) * k3),
    );
    let k5 = f(
        t + h * c(8.0 / 9.0),
        y + h
            * (c(19372.0 / 6561.0) * k1 - c(25360.0 / 2187.0) * k2 + c(64448.0 / 6561.0) * k3
                - c(212.0 / 729.0) * k4),
    );
    let k6 = f(
        t + h,
        y + h
            * (c(9017.0 / 3168.0) * k1 - c(355.0 / 33.0) * k2
                + c(46732.0 / 5247.0) * k3
                + c(49.0 / 176.0) * k4
                - c(5103.0 / 18656.0) * k5),
    );
    let y5 = y + h
        * (c(35.0 / 384.0) * k1 + c(500.0 / 1113.0) * k3 + c(125.0 / 192.0) * k4
            - c(2187.0 / 6784.0) * k5
            + c(11.0 / 84.0) * k6);
    let k7 = f(t + h, y5);
    let y4 = y + h
        * (c(5179.0 / 57600.0) * k1 + c(7571.0 / 16695.0) * k3 + c(393.0 / 640.0) * k4
            - c(92097.0 / 339200.0) * k5
            + c(187.0 / 2100.0) * k6
            + c(1.0 / 40.0) * k7);
    (y5, (y5 - y4).abs())
}
