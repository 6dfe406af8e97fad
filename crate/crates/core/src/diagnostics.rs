//! Per-sample diagnostics rows and the monotonicity / inequality reports
//! evaluated along flow traces.

use ndarray::Array2;

use crate::ambient::MetricField;
use crate::error::{Error, Result};
use crate::flow::{FlowKind, FlowTrace};
use crate::scalar::Real;
use crate::surface::{self, RadialSurface, SurfaceGeometry};
use crate::sweepout::HyperbolicIsoperimetricProfile;
use crate::Regime;

/// Scalars recorded at each flow sample.
#[derive(Clone, Debug)]
pub struct DiagnosticsRow<T> {
    pub t: T,
    pub area: T,
    pub volume: T,
    /// flat-regime Hawking mass
    pub m_h: T,
    /// hyperbolic-regime Hawking mass (H^2 - 4 variant)
    pub m_h_star: T,
    /// A / V^{2/3}
    pub iso_ratio: T,
    pub star_margin: T,
    pub h_min: T,
    pub h_max: T,
    /// scale-normalized curvature bound max |B| sqrt(A)
    pub b_norm_sqrt_a: T,
    /// (int H^2)^{1/3} (int H^{-1})^{2/3} - A; None when min H <= 0
    pub holder_gap: Option<T>,
    pub int_h2: T,
    pub int_h_inv: Option<T>,
}

impl<T: Real> DiagnosticsRow<T> {
    /// Measure every row entry from a surface and its geometry.
    pub fn measure(
        t: T,
        s: &RadialSurface<T>,
        geom: &SurfaceGeometry<T>,
        field: &MetricField<T>,
    ) -> Result<Self> {
        let area = geom.area;
        let volume = surface::enclosed_volume(s, field)?;
        let m_h = surface::hawking_mass(geom, Regime::Flat);
        let m_h_star = surface::hawking_mass(geom, Regime::Hyperbolic);
        let two_thirds = T::of(2.0 / 3.0);
        let iso_ratio = area / volume.powf(two_thirds);
        let int_h2 = geom.integrate_nodes(|i, j| geom.mean_h[[i, j]] * geom.mean_h[[i, j]]);
        let (holder_gap, int_h_inv) = if geom.h_min > T::zero() {
            let inv = geom.integrate_nodes(|i, j| T::one() / geom.mean_h[[i, j]]);
            let gap = int_h2.powf(T::of(1.0 / 3.0)) * inv.powf(two_thirds) - area;
            (Some(gap), Some(inv))
        } else {
            (None, None)
        };
        Ok(DiagnosticsRow {
            t,
            area,
            volume,
            m_h,
            m_h_star,
            iso_ratio,
            star_margin: geom.margin_min,
            h_min: geom.h_min,
            h_max: geom.h_max,
            b_norm_sqrt_a: geom.b_norm_max * area.sqrt(),
            holder_gap,
            int_h2,
            int_h_inv,
        })
    }

    /// A^c value of the enclosed region.
    pub fn ac(&self, c: T) -> T {
        self.area - c * self.volume
    }

    /// Regime-appropriate Hawking mass.
    pub fn mass(&self, regime: Regime) -> T {
        match regime {
            Regime::Flat => self.m_h,
            Regime::Hyperbolic => self.m_h_star,
        }
    }
}

/// Geroch monotonicity over recorded samples.
#[derive(Clone, Debug)]
pub struct GerochReport<T> {
    pub min_increment: T,
    pub monotone: bool,
    pub tolerance: T,
}

/// Default Geroch tolerance, scaled with sqrt(area) to match the mass
/// normalization.
pub fn default_geroch_tolerance<T: Real>(max_area: T) -> T {
    T::of(1e-5) * max_area.sqrt()
}

/// Minimum mass increment between consecutive samples; monotone when it
/// stays above -tolerance.
pub fn geroch_report<T: Real>(
    trace: &FlowTrace<T>,
    regime: Regime,
    tolerance: Option<T>,
) -> Result<GerochReport<T>> {
    if trace.samples.len() < 2 {
        return Err(Error::IncompleteTrace(
            "geroch report needs at least 2 samples".into(),
        ));
    }
    let max_area = trace
        .samples
        .iter()
        .map(|s| s.row.area)
        .fold(T::zero(), |a, b| a.max(b));
    let tolerance = tolerance.unwrap_or_else(|| default_geroch_tolerance(max_area));
    let mut min_increment = T::infinity();
    for pair in trace.samples.windows(2) {
        let inc = pair[1].row.mass(regime) - pair[0].row.mass(regime);
        min_increment = min_increment.min(inc);
    }
    Ok(GerochReport {
        min_increment,
        monotone: min_increment >= -tolerance,
        tolerance,
    })
}

/// Isoperimetric comparison along a trace.
#[derive(Clone, Debug)]
pub struct IsoperimetricReport<T> {
    /// flat: max of A/V^{2/3} - (36 pi)^{1/3}; hyperbolic: max of A - I(V)
    pub max_excess: T,
    /// every sample strictly below the model bound
    pub all_strict: bool,
    pub tolerance: T,
}

pub fn isoperimetric_report<T: Real>(
    trace: &FlowTrace<T>,
    regime: Regime,
) -> Result<IsoperimetricReport<T>> {
    if trace.samples.is_empty() {
        return Err(Error::IncompleteTrace(
            "isoperimetric report needs samples".into(),
        ));
    }
    let mut max_excess = T::neg_infinity();
    let tolerance;
    match regime {
        Regime::Flat => {
            let bound = (T::of(36.0) * T::PI()).powf(T::of(1.0 / 3.0));
            tolerance = T::of(1e-6) * bound;
            for s in &trace.samples {
                max_excess = max_excess.max(s.row.iso_ratio - bound);
            }
        }
        Regime::Hyperbolic => {
            let profile = HyperbolicIsoperimetricProfile::default();
            let refs = profile.areas_at(
                &trace
                    .samples
                    .iter()
                    .map(|s| s.row.volume)
                    .collect::<Vec<_>>(),
            )?;
            let max_area = trace
                .samples
                .iter()
                .map(|s| s.row.area)
                .fold(T::zero(), |a, b| a.max(b));
            tolerance = T::of(1e-6) * max_area.max(T::one());
            for (s, &i_ref) in trace.samples.iter().zip(&refs) {
                max_excess = max_excess.max(s.row.area - i_ref);
            }
        }
    }
    Ok(IsoperimetricReport {
        max_excess,
        all_strict: max_excess < -tolerance,
        tolerance,
    })
}

/// Holder-chain gap (int H^2)^{1/3} (int H^{-1})^{2/3} - A of one surface.
pub fn holder_chain_check<T: Real>(geom: &SurfaceGeometry<T>) -> Result<T> {
    if geom.h_min <= T::zero() {
        return Err(Error::NonPositiveMeanCurvature {
            min_h: geom.h_min.f64(),
        });
    }
    let (int_h2, int_h_inv) = surface::curvature_integrals(geom);
    Ok(int_h2.powf(T::of(1.0 / 3.0)) * int_h_inv.powf(T::of(2.0 / 3.0)) - geom.area)
}

/// Max-norm residuals of the evolution laws measured with centered time
/// differences at interior samples. Residuals are relative to the scale of
/// the quantity whose law is checked.
///
/// Node values are compared in the fixed graph parameterization, which is
/// the normal gauge exactly when the radial direction is normal to the
/// surface (centered spheres, the calibration runs). On tilted surfaces
/// the pointwise laws pick up an additional tangential-reparameterization
/// term; the area law is gauge-free.
#[derive(Clone, Debug)]
pub struct EvolutionResiduals<T> {
    /// d/dt area = area (inverse flow) or -int H^2 (mean curvature flow)
    pub area_law: T,
    /// d/dt g_ab = +/- 2 H^{-1} h_ab (inverse) or -2 H h_ab (mean curvature)
    pub metric_law: T,
    /// d/dt H = Lap H + H (|B|^2 + Ric(nu, nu)); mean curvature flow only
    pub h_law: Option<T>,
}

pub fn evolution_consistency<T: Real>(
    trace: &FlowTrace<T>,
    field: &MetricField<T>,
) -> Result<EvolutionResiduals<T>> {
    if trace.samples.len() < 3 {
        return Err(Error::IncompleteTrace(
            "evolution consistency needs at least 3 samples".into(),
        ));
    }
    let n = trace.samples.len();
    let mut area_res = T::zero();
    let mut metric_res = T::zero();
    let mut h_res = T::neg_infinity();
    let check_h_law = trace.kind == FlowKind::MeanCurvature;

    let mut geom_prev = surface::geometry(&trace.samples[0].surface, field)?;
    let mut geom_mid = surface::geometry(&trace.samples[1].surface, field)?;
    for k in 1..n - 1 {
        let geom_next = surface::geometry(&trace.samples[k + 1].surface, field)?;
        let t_prev = trace.samples[k - 1].t;
        let t_next = trace.samples[k + 1].t;
        let dt2 = t_next - t_prev;

        // area law
        let da = (trace.samples[k + 1].row.area - trace.samples[k - 1].row.area) / dt2;
        let expected = match trace.kind {
            FlowKind::InverseMeanCurvature => trace.samples[k].row.area,
            FlowKind::MeanCurvature => -trace.samples[k].row.int_h2,
        };
        area_res = area_res.max((da - expected).abs() / trace.samples[k].row.area);

        // induced metric law, node-wise
        let mut g_scale = T::zero();
        for arr in [&geom_mid.g_tt, &geom_mid.g_tp, &geom_mid.g_pp] {
            for &v in arr.iter() {
                g_scale = g_scale.max(v.abs());
            }
        }
        let two = T::of(2.0);
        let components: [(&Array2<T>, &Array2<T>, &Array2<T>); 3] = [
            (&geom_prev.g_tt, &geom_next.g_tt, &geom_mid.h_tt),
            (&geom_prev.g_tp, &geom_next.g_tp, &geom_mid.h_tp),
            (&geom_prev.g_pp, &geom_next.g_pp, &geom_mid.h_pp),
        ];
        for (gp, gn, hc) in components {
            for (((&a, &b), &h_comp), &h_mean) in gp
                .iter()
                .zip(gn.iter())
                .zip(hc.iter())
                .zip(geom_mid.mean_h.iter())
            {
                let dg = (b - a) / dt2;
                let rhs = match trace.kind {
                    FlowKind::InverseMeanCurvature => two * h_comp / h_mean,
                    FlowKind::MeanCurvature => -two * h_mean * h_comp,
                };
                metric_res = metric_res.max((dg - rhs).abs() / g_scale);
            }
        }

        // mean curvature law on mean curvature flow traces
        if check_h_law {
            let lap_h = geom_mid.laplace_beltrami(&geom_mid.mean_h);
            let s_mid = &trace.samples[k].surface;
            let grid = s_mid.grid();
            let mut h_scale = T::zero();
            for &v in geom_mid.mean_h.iter() {
                h_scale = h_scale.max(v.abs());
            }
            let mut local = T::zero();
            let mut rhs_arr = Array2::zeros((grid.n_lat(), grid.n_lon()));
            for i in 0..grid.n_lat() {
                for j in 0..grid.n_lon() {
                    let pos = s_mid.position(i, j);
                    let curv = field.curvature_at(&pos)?;
                    let nu = [
                        geom_mid.normal[0][[i, j]],
                        geom_mid.normal[1][[i, j]],
                        geom_mid.normal[2][[i, j]],
                    ];
                    let mut ric_nn = T::zero();
                    for a in 0..3 {
                        for b in 0..3 {
                            ric_nn = ric_nn + curv.ricci[a][b] * nu[a] * nu[b];
                        }
                    }
                    let h = geom_mid.mean_h[[i, j]];
                    let b2 = geom_mid.b_norm[[i, j]] * geom_mid.b_norm[[i, j]];
                    rhs_arr[[i, j]] = lap_h[[i, j]] + h * (b2 + ric_nn);
                }
            }
            for i in 0..grid.n_lat() {
                for j in 0..grid.n_lon() {
                    let dh = (geom_next.mean_h[[i, j]] - geom_prev.mean_h[[i, j]]) / dt2;
                    local = local.max((dh - rhs_arr[[i, j]]).abs() / h_scale);
                }
            }
            h_res = h_res.max(local);
        }

        geom_prev = geom_mid;
        geom_mid = geom_next;
    }
    Ok(EvolutionResiduals {
        area_law: area_res,
        metric_law: metric_res,
        h_law: if check_h_law { Some(h_res) } else { None },
    })
}

/// Largest c with min H(s) >= c min(1, sqrt(s)) across samples.
#[derive(Clone, Debug)]
pub struct FloorFit<T> {
    pub c_fit: T,
}

pub fn mean_curvature_floor_fit<T: Real>(trace: &FlowTrace<T>) -> FloorFit<T> {
    let mut c_fit = T::infinity();
    let mut seen = false;
    for s in &trace.samples {
        if s.row.h_min <= T::zero() {
            return FloorFit { c_fit: T::zero() };
        }
        if s.t > T::zero() {
            seen = true;
            c_fit = c_fit.min(s.row.h_min / s.t.sqrt().min(T::one()));
        }
    }
    if !seen {
        return FloorFit { c_fit: T::zero() };
    }
    FloorFit { c_fit }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{make_metric, MetricSpec};
    use crate::flow::{run_imcf, run_mcf, FlowConfig, FlowSample, FlowStatus, FlowTrace};
    use crate::numerics::gauss::gauss_legendre_on;
    use crate::surface::{geometry, RadialSurface, SphereGrid};
    use crate::sweepout::{ac_functional, hyperbolic_ball, sweepout_report};
    use std::f64::consts::PI;

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b} (tol {tol:e})");
    }

    fn synthetic_row(t: f64, area: f64, volume: f64, h_min: f64) -> DiagnosticsRow<f64> {
        DiagnosticsRow {
            t,
            area,
            volume,
            m_h: 0.0,
            m_h_star: 0.0,
            iso_ratio: area / volume.powf(2.0 / 3.0),
            star_margin: 1.0,
            h_min,
            h_max: h_min,
            b_norm_sqrt_a: 0.0,
            holder_gap: None,
            int_h2: 0.0,
            int_h_inv: None,
        }
    }

    fn synthetic_trace(rows: Vec<DiagnosticsRow<f64>>) -> FlowTrace<f64> {
        let grid = SphereGrid::new(8, 16).unwrap();
        let surface = RadialSurface::round([0.0; 3], 1.0, grid).unwrap();
        FlowTrace {
            kind: FlowKind::InverseMeanCurvature,
            samples: rows
                .into_iter()
                .map(|row| FlowSample {
                    t: row.t,
                    surface: surface.clone(),
                    row,
                })
                .collect(),
            status: FlowStatus::Completed,
        }
    }

    #[test]
    fn holder_gap_vanishes_for_constant_mean_curvature() {
        for spec in [MetricSpec::<f64>::euclidean(), MetricSpec::hyperbolic()] {
            let field = make_metric(spec).unwrap();
            let s = RadialSurface::round([0.0; 3], 1.3, SphereGrid::new(16, 32).unwrap()).unwrap();
            let g = geometry(&s, &field).unwrap();
            let gap = holder_chain_check(&g).unwrap();
            assert!(gap.abs() <= 1e-8 * g.area, "gap {gap:e}");
        }
    }

    #[test]
    fn holder_gap_of_ellipsoid_matches_dense_quadrature() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let grid = SphereGrid::new(64, 128).unwrap();
        let ell = RadialSurface::from_polar_fn([0.0; 3], grid, |th: f64, _| {
            1.0 / (th.sin().powi(2) + th.cos().powi(2) / 4.0).sqrt()
        })
        .unwrap();
        let g = geometry(&ell, &field).unwrap();
        let gap = holder_chain_check(&g).unwrap();
        assert!(gap > 0.0);

        // dense 2000-point surface-of-revolution quadrature of the closed
        // forms for A, int H^2, int H^{-1}
        let (zs, ws) = gauss_legendre_on::<f64>(2000, -2.0, 2.0);
        let (mut a_ref, mut ih2, mut ihinv) = (0.0, 0.0, 0.0);
        for (&z, &w) in zs.iter().zip(&ws) {
            let r = (1.0 - z * z / 4.0).max(1e-300).sqrt();
            let dr = -z / (4.0 * r);
            let ddr = -(1.0 / (4.0 * r)) - z * z / (16.0 * r * r * r);
            let da = 2.0 * PI * r * (1.0 + dr * dr).sqrt();
            let h = -ddr / (1.0 + dr * dr).powf(1.5) + 1.0 / (r * (1.0 + dr * dr).sqrt());
            a_ref += w * da;
            ih2 += w * da * h * h;
            ihinv += w * da / h;
        }
        let gap_ref = ih2.powf(1.0 / 3.0) * ihinv.powf(2.0 / 3.0) - a_ref;
        assert_close(gap, gap_ref, 1e-7 * a_ref.max(1.0), "holder gap");
    }

    #[test]
    fn holder_rejects_nonpositive_mean_curvature() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let caps = RadialSurface::from_polar_fn(
            [0.0; 3],
            SphereGrid::new(32, 64).unwrap(),
            |th: f64, _| 1.0 - 0.45 * th.cos().powi(2),
        )
        .unwrap();
        let g = geometry(&caps, &field).unwrap();
        assert!(matches!(
            holder_chain_check(&g),
            Err(Error::NonPositiveMeanCurvature { .. })
        ));
    }

    #[test]
    fn euclidean_trace_reports() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let cfg = FlowConfig::new(0.4);
        let s = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(16, 32).unwrap()).unwrap();
        let trace = run_imcf(s, &field, &cfg);
        assert!(trace.completed());

        // Geroch: flat space has identically zero Hawking mass
        let geroch = geroch_report(&trace, Regime::Flat, None).unwrap();
        assert!(geroch.monotone, "min increment {:e}", geroch.min_increment);
        for s in &trace.samples {
            assert!(s.row.m_h.abs() < 1e-8, "m_h = {:e}", s.row.m_h);
            // mass identity between the two regimes
            let expect = 4.0 * (s.row.area / (16.0 * PI)).powf(1.5);
            assert_close(
                s.row.m_h_star - s.row.m_h,
                expect,
                1e-10 * expect,
                "mass identity",
            );
            // holder gap recorded and tiny on round spheres
            let gap = s.row.holder_gap.unwrap();
            assert!(gap >= -1e-8 * s.row.area);
            assert!(gap.abs() <= 1e-8 * s.row.area);
        }

        // isoperimetric ratio sits at the euclidean equality value
        let iso = isoperimetric_report(&trace, Regime::Flat).unwrap();
        assert!(iso.max_excess.abs() < 1e-6);
        assert!(!iso.all_strict, "equality case must not report strict");
    }

    #[test]
    fn off_center_schwarzschild_run_is_geroch_monotone() {
        // a unit sphere offset 0.5 from the graph center at |p| = 5: the
        // flow is genuinely non-symmetric and the mass still climbs
        let field = make_metric(MetricSpec::schwarzschild(1.0)).unwrap();
        let offset = 0.5;
        let s = RadialSurface::from_polar_fn(
            [0.0, 0.0, 5.0],
            SphereGrid::new(16, 32).unwrap(),
            |th: f64, _| {
                let c = th.cos();
                offset * c + (1.0 - offset * offset * (1.0 - c * c)).sqrt()
            },
        )
        .unwrap();
        let cfg = FlowConfig::new(1.0);
        let trace = run_imcf(s, &field, &cfg);
        assert!(trace.completed(), "status {:?}", trace.status);
        let ger = geroch_report(&trace, Regime::Flat, None).unwrap();
        assert!(ger.monotone, "min increment {:e}", ger.min_increment);
        assert!(ger.min_increment > 0.0, "expected strict monotonicity");
    }

    #[test]
    fn hyperbolic_ball_trace_sits_on_the_profile() {
        let field = make_metric(MetricSpec::<f64>::hyperbolic()).unwrap();
        let cfg = FlowConfig::new(0.5);
        let s = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(16, 32).unwrap()).unwrap();
        let trace = run_imcf(s, &field, &cfg);
        assert!(trace.completed());
        let iso = isoperimetric_report(&trace, Regime::Hyperbolic).unwrap();
        assert!(iso.max_excess.abs() < 1e-6, "excess {:e}", iso.max_excess);
        assert!(!iso.all_strict);
        // hyperbolic-regime Geroch on the hyperbolic-mass column
        let geroch = geroch_report(&trace, Regime::Hyperbolic, None).unwrap();
        assert!(geroch.monotone);
    }

    #[test]
    fn evolution_residuals_on_model_runs() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let s = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(16, 32).unwrap()).unwrap();
        let mut cfg = FlowConfig::new(0.2);
        cfg.record_every = 1e-2;
        let trace = run_imcf(s.clone(), &field, &cfg);
        assert!(trace.completed());
        let res = evolution_consistency(&trace, &field).unwrap();
        assert!(res.area_law <= 1e-3, "area law residual {:e}", res.area_law);
        assert!(
            res.metric_law <= 1e-3,
            "metric law residual {:e}",
            res.metric_law
        );
        assert!(res.h_law.is_none());

        // mean curvature flow: checks (i), (iii), and the H-law (v)
        let mut cfg = FlowConfig::new(0.02);
        cfg.record_every = 1e-3;
        cfg.stepper.cfl_safety = 0.1;
        let trace = run_mcf(s, &field, &cfg);
        assert!(trace.completed());
        let res = evolution_consistency(&trace, &field).unwrap();
        assert!(res.area_law <= 1e-3, "mcf area law {:e}", res.area_law);
        assert!(
            res.metric_law <= 1e-3,
            "mcf metric law {:e}",
            res.metric_law
        );
        let h_res = res.h_law.unwrap();
        assert!(h_res <= 5e-3, "mcf H law {:e}", h_res);
    }

    #[test]
    fn floor_fit_on_unit_sphere_run() {
        let field = make_metric(MetricSpec::<f64>::euclidean()).unwrap();
        let s = RadialSurface::round([0.0; 3], 1.0, SphereGrid::new(16, 32).unwrap()).unwrap();
        let cfg = FlowConfig::new(1.0);
        let trace = run_imcf(s, &field, &cfg);
        assert!(trace.completed());
        let fit = mean_curvature_floor_fit(&trace);
        // min H(s) = 2 e^{-s/2}; the binding sample is s = 1
        assert_close(fit.c_fit, 2.0 * (-0.5f64).exp(), 2e-3, "c_fit");
        assert!(fit.c_fit >= 2.0 * (-0.5f64).exp() - 2e-3);
    }

    #[test]
    fn floor_fit_zero_on_nonpositive_h() {
        let rows = vec![
            synthetic_row(0.0, 4.0 * PI, 4.0 * PI / 3.0, 2.0),
            synthetic_row(0.5, 5.0, 1.0, -0.1),
        ];
        let fit = mean_curvature_floor_fit(&synthetic_trace(rows));
        assert_eq!(fit.c_fit, 0.0);
    }

    #[test]
    fn sweepout_equality_cases_on_synthetic_ball_families() {
        // euclidean balls through the maximizer r = 2/c = 1
        let c = 2.0;
        let rows: Vec<_> = (1..=200)
            .map(|k| {
                let r = 2.0 * k as f64 / 200.0;
                let area = 4.0 * PI * r * r;
                let vol = 4.0 * PI * r * r * r / 3.0;
                synthetic_row(r, area, vol, 2.0 / r)
            })
            .collect();
        let trace = synthetic_trace(rows);
        let rec = sweepout_report(&trace, Regime::Flat, c, None).unwrap();
        assert_close(rec.reference, 4.0 * PI / 3.0, 1e-14, "reference");
        assert_close(
            rec.sup_ac,
            rec.reference,
            1e-12,
            "sup at the ball maximizer",
        );
        assert!(!rec.strict, "equality case");
        assert_eq!(rec.iso_route_strict, Some(false));
        assert!(rec.routes_agree());
        assert!(rec.mountain_pass_valid);
        // unimodal in radius with maximum at r = 2/c within one sample
        let sup_idx = rec
            .ac
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let r_at_max = trace.samples[sup_idx].row.t;
        assert!((r_at_max - 1.0).abs() <= 0.011, "argmax radius {r_at_max}");
        for k in 1..sup_idx {
            assert!(rec.ac[k] >= rec.ac[k - 1] - 1e-12);
        }
        for k in (sup_idx + 1)..rec.ac.len() {
            assert!(rec.ac[k] <= rec.ac[k - 1] + 1e-12);
        }

        // hyperbolic balls through arctanh(2/c)
        let c = 4.0;
        let rows: Vec<_> = (1..=300)
            .map(|k| {
                let r = 1.5 * k as f64 / 300.0;
                let b = hyperbolic_ball(r);
                synthetic_row(r, b.area, b.volume, b.mean_curvature)
            })
            .collect();
        let trace = synthetic_trace(rows);
        let rec = sweepout_report(&trace, Regime::Hyperbolic, c, Some(1e-4)).unwrap();
        let expected_sup = {
            let b = hyperbolic_ball((0.5f64).atanh());
            ac_functional(b.area, b.volume, c)
        };
        assert!((rec.sup_ac - expected_sup).abs() < 1e-4);
        assert!(!rec.strict);
        assert!(rec.mountain_pass_valid);
    }

    #[test]
    fn sweepout_rejects_incomplete_traces() {
        let mut trace = synthetic_trace(vec![synthetic_row(0.0, 1.0, 0.1, 1.0)]);
        trace.status = FlowStatus::HNonPositive { t: 0.5 };
        assert!(matches!(
            sweepout_report(&trace, Regime::Flat, 2.0, None),
            Err(Error::IncompleteTrace(_))
        ));
    }

    #[test]
    fn geroch_needs_two_samples() {
        let trace = synthetic_trace(vec![synthetic_row(0.0, 1.0, 0.1, 1.0)]);
        assert!(geroch_report(&trace, Regime::Flat, None).is_err());
    }
}
