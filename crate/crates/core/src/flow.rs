//! Explicit time stepping of inverse mean curvature flow (normal speed
//! 1/H) and mean curvature flow (normal speed -H) as radial graph updates
//! on the sphere grid.
//!
//! The normal speed converts to a radial speed through the factor
//! g(omega, nu), the ambient pairing of the coordinate radial direction
//! with the unit normal; on centered spheres this reproduces
//! dr/dt = r/2 (euclidean) and d(ln sinh r)/dt = 1/2 (hyperbolic) exactly.
//! After each update, longitude modes unresolvable near the poles are
//! projected out; fields that are smooth on the sphere are unchanged to
//! spectral accuracy.

use crate::ambient::MetricField;
use crate::diagnostics::DiagnosticsRow;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::surface::{geometry, RadialSurface, SurfaceGeometry};

/// Box-region thresholds: the run stops when the star margin falls below
/// `iota_min` or the scale-normalized curvature max |B| sqrt(A) exceeds
/// `b_max`.
#[derive(Clone, Copy, Debug)]
pub struct MonitorConfig<T> {
    pub iota_min: T,
    pub b_max: T,
}

impl<T: Real> Default for MonitorConfig<T> {
    fn default() -> Self {
        MonitorConfig {
            iota_min: T::of(0.1),
            b_max: T::of(50.0),
        }
    }
}

/// Explicit stepper controls.
#[derive(Clone, Copy, Debug)]
pub struct StepperConfig<T> {
    /// fraction of the stability-limited step, in (0, 1]
    pub cfl_safety: T,
    pub dt_max: T,
}

impl<T: Real> Default for StepperConfig<T> {
    fn default() -> Self {
        StepperConfig {
            cfl_safety: T::of(0.5),
            dt_max: T::of(1e-2),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FlowConfig<T> {
    pub t_end: T,
    pub monitor: MonitorConfig<T>,
    pub stepper: StepperConfig<T>,
    pub record_every: T,
}

impl<T: Real> FlowConfig<T> {
    pub fn new(t_end: T) -> Self {
        FlowConfig {
            t_end,
            monitor: MonitorConfig::default(),
            stepper: StepperConfig::default(),
            record_every: T::of(1e-2),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > T::zero()) {
            return Err(Error::InvalidConfig("t_end must be positive".into()));
        }
        if !(self.monitor.iota_min > T::zero() && self.monitor.iota_min < T::one()) {
            return Err(Error::InvalidConfig("iota_min must lie in (0, 1)".into()));
        }
        if !(self.monitor.b_max > T::zero()) {
            return Err(Error::InvalidConfig("b_max must be positive".into()));
        }
        if !(self.stepper.cfl_safety > T::zero() && self.stepper.cfl_safety <= T::one()) {
            return Err(Error::InvalidConfig("cfl_safety must lie in (0, 1]".into()));
        }
        if !(self.stepper.dt_max > T::zero()) {
            return Err(Error::InvalidConfig("dt_max must be positive".into()));
        }
        if !(self.record_every > T::zero()) {
            return Err(Error::InvalidConfig("record_every must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlowKind {
    InverseMeanCurvature,
    MeanCurvature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxStatus {
    Ok,
    StarViolation,
    CurvatureViolation,
}

/// Pure box-region predicate.
pub fn box_monitor<T: Real>(geom: &SurfaceGeometry<T>, iota_min: T, b_max: T) -> BoxStatus {
    if geom.margin_min < iota_min {
        BoxStatus::StarViolation
    } else if geom.b_norm_max * geom.area.sqrt() > b_max {
        BoxStatus::CurvatureViolation
    } else {
        BoxStatus::Ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoxViolationKind {
    Star,
    Curvature,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FlowStatus<T> {
    Completed,
    BoxViolation { kind: BoxViolationKind, t: T },
    HNonPositive { t: T },
    Degenerate { t: T },
}

#[derive(Clone, Debug)]
pub struct FlowSample<T> {
    pub t: T,
    pub surface: RadialSurface<T>,
    pub row: DiagnosticsRow<T>,
}

/// Recorded history of a flow run.
#[derive(Clone, Debug)]
pub struct FlowTrace<T> {
    pub kind: FlowKind,
    pub samples: Vec<FlowSample<T>>,
    pub status: FlowStatus<T>,
}

impl<T: Real> FlowTrace<T> {
    pub fn completed(&self) -> bool {
        self.status == FlowStatus::Completed
    }

    pub fn final_surface(&self) -> Option<&RadialSurface<T>> {
        self.samples.last().map(|s| &s.surface)
    }
}

/// Radial update with normal speed 1/H (inverse flow) or -H.
fn radial_update<T: Real>(
    s: &RadialSurface<T>,
    geom: &SurfaceGeometry<T>,
    kind: FlowKind,
    dt: T,
) -> Result<RadialSurface<T>> {
    let mut radii = s.radii().clone();
    match kind {
        FlowKind::InverseMeanCurvature => {
            for (r, (&h, &conv)) in radii
                .iter_mut()
                .zip(geom.mean_h.iter().zip(geom.radial_conv.iter()))
            {
                *r = *r + dt / (h * conv);
            }
        }
        FlowKind::MeanCurvature => {
            for (r, (&h, &conv)) in radii
                .iter_mut()
                .zip(geom.mean_h.iter().zip(geom.radial_conv.iter()))
            {
                *r = *r - dt * h / conv;
            }
        }
    }
    s.grid().filter_longitude(&mut radii);
    s.with_radii(radii)
}

/// One explicit inverse-mean-curvature step of size `dt`.
pub fn imcf_step<T: Real>(
    s: &RadialSurface<T>,
    field: &MetricField<T>,
    dt: T,
) -> Result<RadialSurface<T>> {
    let geom = geometry(s, field)?;
    if geom.h_min <= T::zero() {
        return Err(Error::NonPositiveMeanCurvature {
            min_h: geom.h_min.f64(),
        });
    }
    if geom.margin_min <= T::zero() {
        return Err(Error::NonStarShaped {
            margin: geom.margin_min.f64(),
        });
    }
    radial_update(s, &geom, FlowKind::InverseMeanCurvature, dt)
}

/// One explicit mean-curvature step of size `dt`.
pub fn mcf_step<T: Real>(
    s: &RadialSurface<T>,
    field: &MetricField<T>,
    dt: T,
) -> Result<RadialSurface<T>> {
    let geom = geometry(s, field)?;
    if geom.margin_min <= T::zero() {
        return Err(Error::NonStarShaped {
            margin: geom.margin_min.f64(),
        });
    }
    radial_update(s, &geom, FlowKind::MeanCurvature, dt)
}

/// Stability-limited base step. The graph update linearizes to a diffusion
/// with coefficient 1/H^2 (inverse flow) or 1 (mean curvature flow); the
/// explicit limit for the spectral operator is 2 h^2 / pi^2 per unit
/// diffusivity, with the star margin folded in as the speed scale of the
/// radial conversion.
fn base_step<T: Real>(geom: &SurfaceGeometry<T>, kind: FlowKind) -> T {
    let h2 = geom.min_spacing * geom.min_spacing;
    let stability = T::of(2.0) / (T::PI() * T::PI());
    match kind {
        FlowKind::InverseMeanCurvature => {
            stability * h2 * geom.h_min * geom.h_min * geom.margin_min
        }
        FlowKind::MeanCurvature => stability * h2 * geom.margin_min,
    }
}

const MAX_HALVINGS: usize = 20;

fn run_flow<T: Real>(
    kind: FlowKind,
    initial: RadialSurface<T>,
    field: &MetricField<T>,
    cfg: &FlowConfig<T>,
) -> FlowTrace<T> {
    if let Err(err) = cfg.validate() {
        panic!("flow configuration must be valid: {err}");
    }
    let mut samples = Vec::new();
    let status;

    let mut filtered = initial.radii().clone();
    initial.grid().filter_longitude(&mut filtered);
    let mut s = match initial.with_radii(filtered) {
        Ok(s) => s,
        Err(_) => {
            return FlowTrace {
                kind,
                samples,
                status: FlowStatus::Degenerate { t: T::zero() },
            }
        }
    };

    let mut t = T::zero();
    let mut record_index = 0usize;
    let mut geom = match geometry(&s, field) {
        Ok(g) => g,
        Err(_) => {
            return FlowTrace {
                kind,
                samples,
                status: FlowStatus::Degenerate { t },
            };
        }
    };

    'main: loop {
        // record when due
        let due = T::of(record_index as f64) * cfg.record_every;
        if t >= due - T::of(1e-12) * cfg.record_every {
            match DiagnosticsRow::measure(t, &s, &geom, field) {
                Ok(row) => samples.push(FlowSample {
                    t,
                    surface: s.clone(),
                    row,
                }),
                Err(_) => {
                    status = FlowStatus::Degenerate { t };
                    break 'main;
                }
            }
            record_index += 1;
        }

        // state checks
        match box_monitor(&geom, cfg.monitor.iota_min, cfg.monitor.b_max) {
            BoxStatus::StarViolation => {
                status = FlowStatus::BoxViolation {
                    kind: BoxViolationKind::Star,
                    t,
                };
                break 'main;
            }
            BoxStatus::CurvatureViolation => {
                status = FlowStatus::BoxViolation {
                    kind: BoxViolationKind::Curvature,
                    t,
                };
                break 'main;
            }
            BoxStatus::Ok => {}
        }
        if kind == FlowKind::InverseMeanCurvature && geom.h_min <= T::zero() {
            status = FlowStatus::HNonPositive { t };
            break 'main;
        }
        if t >= cfg.t_end - T::of(1e-12) * cfg.t_end.max(T::one()) {
            // make sure the end state is in the record even when t_end is
            // not a multiple of record_every
            let already = samples
                .last()
                .map(|s: &FlowSample<T>| t - s.t <= T::of(1e-12) * t.max(T::one()))
                .unwrap_or(false);
            if !already {
                match DiagnosticsRow::measure(t, &s, &geom, field) {
                    Ok(row) => samples.push(FlowSample {
                        t,
                        surface: s.clone(),
                        row,
                    }),
                    Err(_) => {
                        status = FlowStatus::Degenerate { t };
                        break 'main;
                    }
                }
            }
            status = FlowStatus::Completed;
            break 'main;
        }

        // step size: stability limit, capped and clipped to the next
        // record boundary / end time
        let next_target = (T::of(record_index as f64) * cfg.record_every).min(cfg.t_end);
        let mut dt = cfg.stepper.cfl_safety * base_step(&geom, kind).min(cfg.stepper.dt_max);
        let mut clipped = false;
        if t + dt >= next_target {
            dt = next_target - t;
            clipped = true;
        }

        // attempt the step, halving on failure
        let mut accepted = None;
        let mut failure_h = false;
        for _ in 0..=MAX_HALVINGS {
            let candidate = radial_update(&s, &geom, kind, dt);
            match candidate {
                Ok(cand) => match geometry(&cand, field) {
                    Ok(g_new) => {
                        if kind == FlowKind::InverseMeanCurvature && g_new.h_min <= T::zero() {
                            failure_h = true;
                        } else if g_new.margin_min <= T::zero() {
                            failure_h = false;
                        } else {
                            accepted = Some((cand, g_new));
                            break;
                        }
                    }
                    Err(_) => failure_h = false,
                },
                Err(_) => failure_h = false,
            }
            dt = dt * T::of(0.5);
            clipped = false;
        }
        match accepted {
            Some((cand, g_new)) => {
                s = cand;
                geom = g_new;
                t = if clipped { next_target } else { t + dt };
            }
            None => {
                status = if failure_h {
                    FlowStatus::HNonPositive { t }
                } else {
                    FlowStatus::Degenerate { t }
                };
                break 'main;
            }
        }
    }

    FlowTrace {
        kind,
        samples,
        status,
    }
}

/// Integrate inverse mean curvature flow to `cfg.t_end`.
///
/// Early termination is carried in the trace status, never as an error.
pub fn run_imcf<T: Real>(
    initial: RadialSurface<T>,
    field: &MetricField<T>,
    cfg: &FlowConfig<T>,
) -> FlowTrace<T> {
    run_flow(FlowKind::InverseMeanCurvature, initial, field, cfg)
}

/// Integrate mean curvature flow to `cfg.t_end` (the smoothing parameter).
pub fn run_mcf<T: Real>(
    initial: RadialSurface<T>,
    field: &MetricField<T>,
    cfg: &FlowConfig<T>,
) -> FlowTrace<T> {
    run_flow(FlowKind::MeanCurvature, initial, field, cfg)
}

/// Regularize a surface by composing `n_steps` uniform mean-curvature
/// steps totalling `eps_total`. `eps_total = 0` returns the input.
pub fn run_mcf_smoothing<T: Real>(
    s: &RadialSurface<T>,
    field: &MetricField<T>,
    eps_total: T,
    n_steps: usize,
) -> Result<RadialSurface<T>> {
    if eps_total == T::zero() {
        return Ok(s.clone());
    }
    if !(eps_total > T::zero()) || n_steps == 0 {
        return Err(Error::InvalidConfig(
            "smoothing needs eps_total >= 0 and at least one step".into(),
        ));
    }
    let dt = eps_total / T::of(n_steps as f64);
    let mut current = s.clone();
    for _ in 0..n_steps {
        current = mcf_step(&current, field, dt)?;
    }
    Ok(current)
}


#[cfg(test)]
mod config_tests {
    use super::*;
    use crate::ambient::{make_metric, MetricSpec};
    use crate::surface::{RadialSurface, SphereGrid};

    #[test]
    fn validate_rejects_each_bad_field() {
        let mut cfg = FlowConfig::new(1.0f64);
        assert!(cfg.validate().is_ok());
        cfg.t_end = 0.0;
        assert!(cfg.validate().is_err());
        cfg = FlowConfig::new(1.0);
        cfg.monitor.iota_min = 1.0;
        assert!(cfg.validate().is_err());
        cfg = FlowConfig::new(1.0);
        cfg.stepper.cfl_safety = 0.0;
        assert!(cfg.validate().is_err());
        cfg = FlowConfig::new(1.0);
        cfg.stepper.dt_max = -1.0;
        assert!(cfg.validate().is_err());
        cfg = FlowConfig::new(1.0);
        cfg.record_every = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    #[should_panic(expected = "flow configuration must be valid")]
    fn run_panics_on_invalid_config() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let s = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(8, 16).unwrap()).unwrap();
        let mut cfg = FlowConfig::new(1.0);
        cfg.record_every = -1.0;
        let _ = run_imcf(s, &field, &cfg);
    }

    #[test]
    fn smoothing_rejects_bad_arguments() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let s = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(8, 16).unwrap()).unwrap();
        assert!(run_mcf_smoothing(&s, &field, -1e-3, 10).is_err());
        assert!(run_mcf_smoothing(&s, &field, 1e-3, 0).is_err());
    }
}
