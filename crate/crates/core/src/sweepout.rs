//! The A^c functional along traces, closed-form min-max reference values,
//! hyperbolic ball quantities, the hyperbolic isoperimetric profile, and
//! the mountain-pass comparison.

use crate::error::{Error, Result};
use crate::flow::FlowTrace;
use crate::numerics::ode::integrate_to;
use crate::numerics::search::golden_section_max;
use crate::scalar::Real;
use crate::Regime;

/// A^c(Omega) = Area - c Vol.
pub fn ac_functional<T: Real>(area: T, volume: T, c: T) -> T {
    area - c * volume
}

/// Area, enclosed volume, and mean curvature of a geodesic ball in
/// hyperbolic 3-space.
#[derive(Clone, Copy, Debug)]
pub struct BallGeometry<T> {
    pub area: T,
    pub volume: T,
    pub mean_curvature: T,
}

/// Closed forms 4 pi sinh^2 r, pi (sinh 2r - 2r), 2 coth r.
pub fn hyperbolic_ball<T: Real>(r: T) -> BallGeometry<T> {
    let pi = T::PI();
    let two = T::of(2.0);
    BallGeometry {
        area: T::of(4.0) * pi * r.sinh() * r.sinh(),
        volume: pi * ((two * r).sinh() - two * r),
        mean_curvature: two / r.tanh(),
    }
}

/// Radius of the ball maximizing A^c in hyperbolic space: arctanh(2/c).
pub fn hyperbolic_max_radius<T: Real>(c: T) -> Result<T> {
    if !(c > T::of(2.0)) {
        return Err(Error::InvalidConfig(format!(
            "hyperbolic reference needs c > 2 (closed surfaces of constant mean curvature \
             at most 2 do not exist); got c = {}",
            c.f64()
        )));
    }
    Ok((T::of(2.0) / c).atanh())
}

/// Min-max reference value: (4 pi / 3)(2/c)^2 in the flat regime; the
/// maximal ball value alpha_c in the hyperbolic regime (c > 2), where the
/// closed form is cross-checked against a golden-section maximization of
/// r -> A^c(ball_r) and a disagreement above 1e-9 is an internal error.
pub fn omega_c_reference<T: Real>(regime: Regime, c: T) -> Result<T> {
    match regime {
        Regime::Flat => {
            if !(c > T::zero()) {
                return Err(Error::InvalidConfig(format!(
                    "flat reference needs c > 0; got c = {}",
                    c.f64()
                )));
            }
            let two_over_c = T::of(2.0) / c;
            Ok(T::of(4.0 / 3.0) * T::PI() * two_over_c * two_over_c)
        }
        Regime::Hyperbolic => {
            let r_star = hyperbolic_max_radius(c)?;
            let ball = hyperbolic_ball(r_star);
            let closed = ac_functional(ball.area, ball.volume, c);
            let objective = |r: T| {
                let b = hyperbolic_ball(r);
                ac_functional(b.area, b.volume, c)
            };
            let hi = r_star * T::of(3.0) + T::one();
            let (_, searched) = golden_section_max(&objective, T::of(1e-9), hi, T::of(1e-12));
            if (closed - searched).abs() > T::of(1e-9) * closed.abs().max(T::one()) {
                return Err(Error::Internal(format!(
                    "hyperbolic reference mismatch: closed form {:e}, search {:e}",
                    closed.f64(),
                    searched.f64()
                )));
            }
            Ok(closed)
        }
    }
}

/// Hyperbolic isoperimetric profile by integrating
/// I'(V) = sqrt((16 pi + 4 I) / I) from the euclidean small-volume
/// asymptote.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicIsoperimetricProfile<T> {
    pub v_start: T,
    pub rtol: T,
    pub atol: T,
}

impl<T: Real> Default for HyperbolicIsoperimetricProfile<T> {
    fn default() -> Self {
        HyperbolicIsoperimetricProfile {
            v_start: T::of(1e-8),
            rtol: T::of(1e-9),
            atol: T::of(1e-12),
        }
    }
}

impl<T: Real> HyperbolicIsoperimetricProfile<T> {
    fn seed(&self, v: T) -> T {
        (T::of(36.0) * T::PI()).powf(T::of(1.0 / 3.0)) * v.powf(T::of(2.0 / 3.0))
    }

    fn rhs() -> impl Fn(T, T) -> T {
        |_v: T, i: T| {
            let i_safe = i.max(T::of(1e-300));
            ((T::of(16.0) * T::PI() + T::of(4.0) * i_safe) / i_safe).sqrt()
        }
    }

    /// Minimal boundary area enclosing volume `v`.
    pub fn area_at(&self, v: T) -> Result<T> {
        if !(v >= T::zero()) || !v.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "profile volume {:e}",
                v.f64()
            )));
        }
        if v <= self.v_start {
            return Ok(self.seed(v));
        }
        Ok(integrate_to(
            &Self::rhs(),
            self.v_start,
            self.seed(self.v_start),
            v,
            self.rtol,
            self.atol,
        ))
    }

    /// Profile at each listed volume; one monotone integration sweep.
    pub fn areas_at(&self, volumes: &[T]) -> Result<Vec<T>> {
        let mut order: Vec<usize> = (0..volumes.len()).collect();
        order.sort_by(|&a, &b| {
            volumes[a]
                .partial_cmp(&volumes[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut out = vec![T::zero(); volumes.len()];
        let mut v_cur = self.v_start;
        let mut i_cur = self.seed(self.v_start);
        let rhs = Self::rhs();
        for &idx in &order {
            let v = volumes[idx];
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "profile volume {:e}",
                    v.f64()
                )));
            }
            if v <= self.v_start {
                out[idx] = self.seed(v);
                continue;
            }
            if v > v_cur {
                i_cur = integrate_to(&rhs, v_cur, i_cur, v, self.rtol, self.atol);
                v_cur = v;
            }
            out[idx] = i_cur;
        }
        Ok(out)
    }
}

/// Euclidean-coordinate radius in the Poincare ball model reached by the
/// standard solution at time t: e^{t/2} sinh(1) / (sqrt(1 + e^t sinh^2 1) + 1).
pub fn poincare_radius<T: Real>(t: T) -> T {
    let s = T::one().sinh() * (t * T::of(0.5)).exp();
    s / ((T::one() + s * s).sqrt() + T::one())
}

/// Area of the Poincare-model coordinate sphere of radius `r` in the
/// hyperbolic metric 4 (1 - |x|^2)^{-2} delta.
pub fn poincare_sphere_area<T: Real>(r: T) -> T {
    let denom = T::one() - r * r;
    T::of(16.0) * T::PI() * r * r / (denom * denom)
}

/// A^c values along a trace compared against the min-max reference.
#[derive(Clone, Debug)]
pub struct SweepOutRecord<T> {
    pub c: T,
    /// A^c per recorded sample
    pub ac: Vec<T>,
    pub sup_ac: T,
    pub reference: T,
    /// sup A^c < reference - margin
    pub strict: bool,
    /// final A^c < 0
    pub mountain_pass_valid: bool,
    /// strictness re-derived from the isoperimetric-ratio envelope
    /// (flat regime only)
    pub iso_route_strict: Option<bool>,
    pub strict_margin: T,
}

impl<T: Real> SweepOutRecord<T> {
    /// The two strictness routes agree (vacuously true when only one
    /// route exists).
    pub fn routes_agree(&self) -> bool {
        self.iso_route_strict
            .map(|s| s == self.strict)
            .unwrap_or(true)
    }
}

/// Evaluate A^c along a completed trace and compare against the regime
/// reference. The default strictness margin is 1e-6 * reference.
pub fn sweepout_report<T: Real>(
    trace: &FlowTrace<T>,
    regime: Regime,
    c: T,
    margin: Option<T>,
) -> Result<SweepOutRecord<T>> {
    if !trace.completed() {
        return Err(Error::IncompleteTrace(format!(
            "sweep-out report needs a completed trace; status {:?}",
            trace.status
        )));
    }
    if trace.samples.is_empty() {
        return Err(Error::IncompleteTrace(
            "sweep-out report needs samples".into(),
        ));
    }
    let reference = omega_c_reference(regime, c)?;
    let strict_margin = margin.unwrap_or(T::of(1e-6) * reference);
    let ac: Vec<T> = trace.samples.iter().map(|s| s.row.ac(c)).collect();
    let sup_ac = ac.iter().copied().fold(T::neg_infinity(), T::max);
    let strict = sup_ac < reference - strict_margin;
    let mountain_pass_valid = *ac.last().expect("non-empty") < T::zero();

    // In the flat regime the sub-euclidean ratio bounds each sample by
    // A^c <= ratio^3 * 4 / (27 c^2) (the bound over all volumes at that
    // ratio), which equals the reference exactly at the euclidean ratio
    // (36 pi)^{1/3}. Applied at the A^c-argmax sample this re-derives
    // strictness of the supremum; emerging flows sit at isoperimetric
    // near-equality near their start, so the global ratio maximum would
    // be too coarse.
    let iso_route_strict = match regime {
        Regime::Flat => {
            let argmax = ac
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(k, _)| k)
                .expect("non-empty");
            let ratio = trace.samples[argmax].row.iso_ratio;
            let envelope = ratio.powi(3) * T::of(4.0 / 27.0) / (c * c);
            Some(envelope < reference - strict_margin)
        }
        Regime::Hyperbolic => None,
    };

    Ok(SweepOutRecord {
        c,
        ac,
        sup_ac,
        reference,
        strict,
        mountain_pass_valid,
        iso_route_strict,
        strict_margin,
    })
}
