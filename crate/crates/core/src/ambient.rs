//! Ambient Riemannian metrics on a coordinate chart of R^3.
//!
//! Every chart point is a plain 3-vector. Cartesian charts carry the metric
//! components directly; geodesic-polar charts use polar-adapted components:
//! the direction away from the chart origin is the geodesic radial direction
//! and the tangential block is scaled by the model's angular profile. In
//! both cases callers see a symmetric 3x3 `g_ij(x)`, its inverse, and the
//! Christoffel symbols, so surfaces and flows are chart-agnostic.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat3, Vec3};
use crate::scalar::Real;

/// A point of the coordinate chart.
pub type ChartPoint<T> = [T; 3];

/// Scalar field callback for conformal factors.
pub type ScalarField<T> = Arc<dyn Fn(&ChartPoint<T>) -> T + Send + Sync>;

/// Christoffel symbols, indexed `[k][i][j]` for Gamma^k_ij.
pub type Christoffel<T> = [[[T; 3]; 3]; 3];

/// Coordinate chart of the model.
#[derive(Clone, Debug, PartialEq)]
pub enum Chart<T> {
    Cartesian,
    GeodesicPolar { origin: ChartPoint<T> },
}

impl<T: Real> Chart<T> {
    pub fn origin(&self) -> ChartPoint<T> {
        match self {
            Chart::Cartesian => [T::zero(); 3],
            Chart::GeodesicPolar { origin } => *origin,
        }
    }
}

/// Declared decay class of a user-supplied conformal factor. Recorded
/// metadata only; the decay rate itself is not verified numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    Flat,
    Hyperbolic,
}

/// Conformal deformation `factor * base` of a model metric.
#[derive(Clone)]
pub struct ConformalSpec<T> {
    pub factor: ScalarField<T>,
    pub base: Box<MetricKind<T>>,
    pub decay: DecayClass,
}

/// The model metrics.
#[derive(Clone)]
pub enum MetricKind<T> {
    Euclidean,
    /// Isotropic-coordinate Schwarzschild: g = (1 + m/(2|x|))^4 delta.
    Schwarzschild {
        mass: T,
    },
    /// dr^2 + sinh^2 r g_{S^2} about the chart origin.
    HyperbolicPolar,
    /// dr^2/(1 + r^2 - 2m/r) + r^2 g_{S^2} in the areal-radius chart.
    AdsSchwarzschild {
        mass: T,
    },
    Conformal(ConformalSpec<T>),
}

impl<T: fmt::Debug> fmt::Debug for MetricKind<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Euclidean => write!(f, "Euclidean"),
            MetricKind::Schwarzschild { mass } => write!(f, "Schwarzschild {{ mass: {mass:?} }}"),
            MetricKind::HyperbolicPolar => write!(f, "HyperbolicPolar"),
            MetricKind::AdsSchwarzschild { mass } => {
                write!(f, "AdsSchwarzschild {{ mass: {mass:?} }}")
            }
            MetricKind::Conformal(spec) => {
                write!(
                    f,
                    "Conformal {{ base: {:?}, decay: {:?} }}",
                    spec.base, spec.decay
                )
            }
        }
    }
}

/// Metric specification: which model, on which chart.
#[derive(Clone, Debug)]
pub struct MetricSpec<T> {
    pub kind: MetricKind<T>,
    pub chart: Chart<T>,
}

impl<T: Real> MetricSpec<T> {
    pub fn euclidean() -> Self {
        MetricSpec {
            kind: MetricKind::Euclidean,
            chart: Chart::Cartesian,
        }
    }

    pub fn schwarzschild(mass: T) -> Self {
        MetricSpec {
            kind: MetricKind::Schwarzschild { mass },
            chart: Chart::Cartesian,
        }
    }

    pub fn hyperbolic() -> Self {
        MetricSpec {
            kind: MetricKind::HyperbolicPolar,
            chart: Chart::GeodesicPolar {
                origin: [T::zero(); 3],
            },
        }
    }

    pub fn ads_schwarzschild(mass: T) -> Self {
        MetricSpec {
            kind: MetricKind::AdsSchwarzschild { mass },
            chart: Chart::GeodesicPolar {
                origin: [T::zero(); 3],
            },
        }
    }

    /// Conformal deformation of a model metric; the chart is inherited from
    /// the base kind.
    pub fn conformal(factor: ScalarField<T>, base: MetricSpec<T>, decay: DecayClass) -> Self {
        MetricSpec {
            kind: MetricKind::Conformal(ConformalSpec {
                factor,
                base: Box::new(base.kind),
                decay,
            }),
            chart: base.chart,
        }
    }

    /// Constant conformal rescaling `lambda^2 * base`.
    pub fn scaled(lambda: T, base: MetricSpec<T>) -> Self {
        let factor = lambda * lambda;
        let decay = match base.kind.natural_chart_is_polar() {
            true => DecayClass::Hyperbolic,
            false => DecayClass::Flat,
        };
        Self::conformal(Arc::new(move |_: &ChartPoint<T>| factor), base, decay)
    }
}

impl<T: Real> MetricKind<T> {
    fn natural_chart_is_polar(&self) -> bool {
        match self {
            MetricKind::Euclidean | MetricKind::Schwarzschild { .. } => false,
            MetricKind::HyperbolicPolar | MetricKind::AdsSchwarzschild { .. } => true,
            MetricKind::Conformal(spec) => spec.base.natural_chart_is_polar(),
        }
    }
}

/// How metric derivatives are produced.
#[derive(Clone, Debug, PartialEq)]
pub enum DerivativeMode<T> {
    ClosedForm,
    /// Central differences with step `rel_step * max(1, |x - origin|)`.
    FiniteDifference {
        rel_step: T,
    },
}

/// Default relative finite-difference step.
pub fn default_fd_step<T: Real>() -> T {
    T::of(1e-4)
}

/// Metric value, inverse, and Christoffel symbols at a point.
#[derive(Clone, Debug)]
pub struct MetricData<T> {
    pub g: Mat3<T>,
    pub g_inv: Mat3<T>,
    pub christoffel: Christoffel<T>,
}

/// Ricci tensor (chart components) and scalar curvature at a point.
#[derive(Clone, Debug)]
pub struct CurvatureValue<T> {
    pub ricci: Mat3<T>,
    pub scalar: T,
}

impl<T: Real> CurvatureValue<T> {
    /// Relative defect of `scalar` against the double trace of `ricci`.
    pub fn trace_consistency(&self, g_inv: &Mat3<T>) -> T {
        let mut tr = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                tr = tr + g_inv[i][j] * self.ricci[i][j];
            }
        }
        (tr - self.scalar).abs() / (T::one() + self.scalar.abs())
    }
}

/// An evaluable ambient metric.
#[derive(Clone, Debug)]
pub struct MetricField<T> {
    spec: MetricSpec<T>,
    mode: DerivativeMode<T>,
}

/// Build a field from a spec, selecting the derivative mode automatically:
/// closed form for the four model kinds, finite differences for conformal
/// factors.
pub fn make_metric<T: Real>(spec: MetricSpec<T>) -> Result<MetricField<T>> {
    let mode = match spec.kind {
        MetricKind::Conformal(_) => DerivativeMode::FiniteDifference {
            rel_step: default_fd_step(),
        },
        _ => DerivativeMode::ClosedForm,
    };
    MetricField::with_mode(spec, mode)
}

impl<T: Real> MetricField<T> {
    pub fn with_mode(spec: MetricSpec<T>, mode: DerivativeMode<T>) -> Result<Self> {
        validate_spec(&spec)?;
        if let (MetricKind::Conformal(_), DerivativeMode::ClosedForm) = (&spec.kind, &mode) {
            return Err(Error::InvalidConfig(
                "conformal metrics require the finite-difference derivative mode".into(),
            ));
        }
        Ok(MetricField { spec, mode })
    }

    pub fn spec(&self) -> &MetricSpec<T> {
        &self.spec
    }

    pub fn mode(&self) -> &DerivativeMode<T> {
        &self.mode
    }

    pub fn chart_origin(&self) -> ChartPoint<T> {
        self.spec.chart.origin()
    }

    /// Radius about the chart origin below which points are outside the
    /// admissible domain (horizon radius for the black-hole models).
    pub fn inner_radius(&self) -> T {
        inner_radius_of(&self.spec.kind)
    }

    pub fn admissible(&self, x: &ChartPoint<T>) -> bool {
        let r = linalg::norm(&linalg::sub(x, &self.chart_origin()));
        match &self.spec.kind {
            MetricKind::Euclidean => true,
            _ => r > self.inner_radius(),
        }
    }

    fn require_admissible(&self, x: &ChartPoint<T>) -> Result<()> {
        if self.admissible(x) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "point ({:e}, {:e}, {:e}) lies at radius <= {:e} about the chart origin",
                x[0].f64(),
                x[1].f64(),
                x[2].f64(),
                self.inner_radius().f64()
            )))
        }
    }

    /// Metric components at `x`.
    pub fn metric(&self, x: &ChartPoint<T>) -> Result<Mat3<T>> {
        self.require_admissible(x)?;
        Ok(kind_metric(&self.spec.kind, &self.spec.chart, x))
    }

    /// sqrt(det g) at `x`; used by volume quadrature.
    pub fn sqrt_det(&self, x: &ChartPoint<T>) -> Result<T> {
        let g = self.metric(x)?;
        let det = linalg::det3(&g);
        if det <= T::zero() {
            return Err(Error::Domain("metric determinant is not positive".into()));
        }
        Ok(det.sqrt())
    }

    /// Metric, inverse, and first derivatives at `x`.
    pub fn jet(&self, x: &ChartPoint<T>) -> Result<MetricJet<T>> {
        self.require_admissible(x)?;
        let (g, dg) = match &self.mode {
            DerivativeMode::ClosedForm => kind_metric_deriv(&self.spec.kind, &self.spec.chart, x),
            DerivativeMode::FiniteDifference { rel_step } => {
                let h = self.local_step(*rel_step, x);
                self.fd_jet(x, h)?
            }
        };
        let g_inv = kind_metric_inverse(&self.spec.kind, &self.spec.chart, x);
        Ok(MetricJet { g, g_inv, dg })
    }

    /// The spec-level `metric_at` surface: value, inverse, Christoffels.
    pub fn metric_at(&self, x: &ChartPoint<T>) -> Result<MetricData<T>> {
        let jet = self.jet(x)?;
        let christoffel = christoffel_from_jet(&jet);
        Ok(MetricData {
            g: jet.g,
            g_inv: jet.g_inv,
            christoffel,
        })
    }

    pub fn christoffel(&self, x: &ChartPoint<T>) -> Result<Christoffel<T>> {
        let jet = self.jet(x)?;
        Ok(christoffel_from_jet(&jet))
    }

    fn local_step(&self, rel_step: T, x: &ChartPoint<T>) -> T {
        let r = linalg::norm(&linalg::sub(x, &self.chart_origin()));
        rel_step * r.max(T::one())
    }

    /// Finite-difference (g, dg). The metric values themselves are always
    /// exact; for conformal kinds only the factor is differenced and the
    /// base derivatives stay closed-form.
    fn fd_jet(&self, x: &ChartPoint<T>, h: T) -> Result<(Mat3<T>, [Mat3<T>; 3])> {
        let chart = &self.spec.chart;
        match &self.spec.kind {
            MetricKind::Conformal(spec) => {
                let f = (spec.factor)(x);
                if f <= T::zero() {
                    return Err(Error::Domain("conformal factor is not positive".into()));
                }
                let (gb, dgb) = kind_metric_deriv(&spec.base, chart, x);
                let mut g = [[T::zero(); 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        g[i][j] = f * gb[i][j];
                    }
                }
                let mut dg = [[[T::zero(); 3]; 3]; 3];
                for k in 0..3 {
                    let (xp, xm) = offset_pair(x, k, h);
                    self.require_admissible(&xp)?;
                    self.require_admissible(&xm)?;
                    let df = ((spec.factor)(&xp) - (spec.factor)(&xm)) / (T::of(2.0) * h);
                    for i in 0..3 {
                        for j in 0..3 {
                            dg[k][i][j] = df * gb[i][j] + f * dgb[k][i][j];
                        }
                    }
                }
                Ok((g, dg))
            }
            kind => {
                let g = kind_metric(kind, chart, x);
                let mut dg = [[[T::zero(); 3]; 3]; 3];
                for k in 0..3 {
                    let (xp, xm) = offset_pair(x, k, h);
                    self.require_admissible(&xp)?;
                    self.require_admissible(&xm)?;
                    let gp = kind_metric(kind, chart, &xp);
                    let gm = kind_metric(kind, chart, &xm);
                    for i in 0..3 {
                        for j in 0..3 {
                            dg[k][i][j] = (gp[i][j] - gm[i][j]) / (T::of(2.0) * h);
                        }
                    }
                }
                Ok((g, dg))
            }
        }
    }

    /// Ricci tensor and scalar curvature at `x`.
    ///
    /// Christoffel symbols are differenced with Richardson-extrapolated
    /// central stencils of step `1e-4 * max(1, |x - origin|)`.
    pub fn curvature_at(&self, x: &ChartPoint<T>) -> Result<CurvatureValue<T>> {
        self.require_admissible(x)?;
        let h = self.local_step(default_fd_step(), x);
        // the stencil reaches 2h in FD mode (nested differencing)
        let reach = T::of(2.0) * h;
        let r = linalg::norm(&linalg::sub(x, &self.chart_origin()));
        if !matches!(self.spec.kind, MetricKind::Euclidean) && r - reach <= self.inner_radius() {
            return Err(Error::Domain(
                "curvature stencil reaches past the chart boundary".into(),
            ));
        }

        let gamma0 = self.christoffel(x)?;
        let jet = self.jet(x)?;
        let mut dgamma = [[[[T::zero(); 3]; 3]; 3]; 3]; // [d][k][i][j]
        for d in 0..3 {
            let coarse = self.gamma_central_diff(x, d, h)?;
            let fine = self.gamma_central_diff(x, d, h * T::of(0.5))?;
            for k in 0..3 {
                for i in 0..3 {
                    for j in 0..3 {
                        dgamma[d][k][i][j] =
                            (T::of(4.0) * fine[k][i][j] - coarse[k][i][j]) / T::of(3.0);
                    }
                }
            }
        }

        let mut ricci = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut r_ij = T::zero();
                for k in 0..3 {
                    r_ij = r_ij + dgamma[k][k][i][j] - dgamma[i][k][k][j];
                    for l in 0..3 {
                        r_ij = r_ij + gamma0[k][k][l] * gamma0[l][i][j]
                            - gamma0[k][i][l] * gamma0[l][k][j];
                    }
                }
                ricci[i][j] = r_ij;
            }
        }
        // symmetrize away finite-difference noise
        for i in 0..3 {
            for j in (i + 1)..3 {
                let s = (ricci[i][j] + ricci[j][i]) * T::of(0.5);
                ricci[i][j] = s;
                ricci[j][i] = s;
            }
        }
        let mut scalar = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                scalar = scalar + jet.g_inv[i][j] * ricci[i][j];
            }
        }
        Ok(CurvatureValue { ricci, scalar })
    }

    fn gamma_central_diff(&self, x: &ChartPoint<T>, d: usize, h: T) -> Result<Christoffel<T>> {
        let (xp, xm) = offset_pair(x, d, h);
        let gp = self.christoffel(&xp)?;
        let gm = self.christoffel(&xm)?;
        let mut out = [[[T::zero(); 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    out[k][i][j] = (gp[k][i][j] - gm[k][i][j]) / (T::of(2.0) * h);
                }
            }
        }
        Ok(out)
    }
}

/// Metric value, inverse, and first derivatives; `dg[k][i][j]` is
/// `d g_ij / d x^k`.
#[derive(Clone, Debug)]
pub struct MetricJet<T> {
    pub g: Mat3<T>,
    pub g_inv: Mat3<T>,
    pub dg: [Mat3<T>; 3],
}

/// Gamma^k_ij = (1/2) g^{kl} (d_i g_lj + d_j g_li - d_l g_ij).
pub fn christoffel_from_jet<T: Real>(jet: &MetricJet<T>) -> Christoffel<T> {
    let half = T::of(0.5);
    let mut gamma = [[[T::zero(); 3]; 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let mut lower = [T::zero(); 3];
            for (l, slot) in lower.iter_mut().enumerate() {
                *slot = half * (jet.dg[i][l][j] + jet.dg[j][l][i] - jet.dg[l][i][j]);
            }
            for k in 0..3 {
                let mut s = T::zero();
                for l in 0..3 {
                    s = s + jet.g_inv[k][l] * lower[l];
                }
                gamma[k][i][j] = s;
                gamma[k][j][i] = s;
            }
        }
    }
    gamma
}

fn offset_pair<T: Real>(x: &ChartPoint<T>, k: usize, h: T) -> (ChartPoint<T>, ChartPoint<T>) {
    let mut xp = *x;
    let mut xm = *x;
    xp[k] = xp[k] + h;
    xm[k] = xm[k] - h;
    (xp, xm)
}

fn validate_spec<T: Real>(spec: &MetricSpec<T>) -> Result<()> {
    validate_kind(&spec.kind, &spec.chart)?;
    let polar_kind = spec.kind.natural_chart_is_polar();
    let polar_chart = matches!(spec.chart, Chart::GeodesicPolar { .. });
    if polar_kind != polar_chart {
        return Err(Error::InvalidConfig(format!(
            "metric kind {:?} does not match chart {:?}",
            spec.kind, spec.chart
        )));
    }
    Ok(())
}

fn validate_kind<T: Real>(kind: &MetricKind<T>, chart: &Chart<T>) -> Result<()> {
    match kind {
        MetricKind::Euclidean | MetricKind::HyperbolicPolar => Ok(()),
        MetricKind::Schwarzschild { mass } => {
            if *mass <= T::zero() {
                Err(Error::InvalidConfig(
                    "schwarzschild mass must be positive".into(),
                ))
            } else {
                Ok(())
            }
        }
        MetricKind::AdsSchwarzschild { mass } => {
            if *mass < T::zero() {
                Err(Error::InvalidConfig(
                    "ads-schwarzschild mass must be non-negative".into(),
                ))
            } else {
                Ok(())
            }
        }
        MetricKind::Conformal(spec) => {
            if matches!(*spec.base, MetricKind::Conformal(_)) {
                return Err(Error::InvalidConfig(
                    "conformal base must be one of the model kinds".into(),
                ));
            }
            validate_kind(&spec.base, chart)?;
            // positivity probe along the axes and a diagonal
            let origin = chart.origin();
            let r0 = inner_radius_of(&spec.base);
            let dirs: [[f64; 3]; 4] = [
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.577_350_269_189_625_8; 3],
            ];
            for scale in [1.0, 3.0, 10.0] {
                for dir in dirs {
                    let r = (r0 + T::one()) * T::of(scale);
                    let p = [
                        origin[0] + r * T::of(dir[0]),
                        origin[1] + r * T::of(dir[1]),
                        origin[2] + r * T::of(dir[2]),
                    ];
                    if (spec.factor)(&p) <= T::zero() {
                        return Err(Error::InvalidConfig(
                            "conformal factor probe returned a non-positive value".into(),
                        ));
                    }
                }
            }
            Ok(())
        }
    }
}

fn inner_radius_of<T: Real>(kind: &MetricKind<T>) -> T {
    match kind {
        MetricKind::Euclidean | MetricKind::HyperbolicPolar => T::zero(),
        MetricKind::Schwarzschild { mass } => *mass * T::of(0.5),
        MetricKind::AdsSchwarzschild { mass } => {
            if *mass <= T::zero() {
                T::zero()
            } else {
                ads_horizon_radius(*mass)
            }
        }
        MetricKind::Conformal(spec) => inner_radius_of(&spec.base),
    }
}

/// Positive root of r^3 + r - 2m = 0.
fn ads_horizon_radius<T: Real>(mass: T) -> T {
    let two_m = T::of(2.0) * mass;
    let mut r = two_m.cbrt().max(T::of(1e-8));
    for _ in 0..80 {
        let f = r * r * r + r - two_m;
        let df = T::of(3.0) * r * r + T::one();
        let dr = f / df;
        r = r - dr;
        if dr.abs() <= T::epsilon() * (T::one() + r.abs()) {
            break;
        }
    }
    r
}

/// Raw metric components for a kind on a chart.
fn kind_metric<T: Real>(kind: &MetricKind<T>, chart: &Chart<T>, x: &ChartPoint<T>) -> Mat3<T> {
    match kind {
        MetricKind::Euclidean => linalg::identity3(),
        MetricKind::Schwarzschild { mass } => {
            let r = linalg::norm(x);
            let phi = T::one() + *mass / (T::of(2.0) * r);
            let c = phi.powi(4);
            let mut g = [[T::zero(); 3]; 3];
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = c;
            }
            g
        }
        MetricKind::HyperbolicPolar => {
            let y = linalg::sub(x, &chart.origin());
            let r = linalg::norm(&y);
            radial_profile_metric(&y, r, T::one(), sinhc_sq(r))
        }
        MetricKind::AdsSchwarzschild { mass } => {
            let y = linalg::sub(x, &chart.origin());
            let r = linalg::norm(&y);
            let v = T::one() + r * r - T::of(2.0) * *mass / r;
            radial_profile_metric(&y, r, T::one() / v, T::one())
        }
        MetricKind::Conformal(spec) => {
            let f = (spec.factor)(x);
            let gb = kind_metric(&spec.base, chart, x);
            let mut g = [[T::zero(); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    g[i][j] = f * gb[i][j];
                }
            }
            g
        }
    }
}

/// Analytic inverse metric; every kind is conformal or radial-profile, so
/// the inverse never goes through an ill-conditioned solve.
fn kind_metric_inverse<T: Real>(
    kind: &MetricKind<T>,
    chart: &Chart<T>,
    x: &ChartPoint<T>,
) -> Mat3<T> {
    match kind {
        MetricKind::Euclidean => linalg::identity3(),
        MetricKind::Schwarzschild { mass } => {
            let r = linalg::norm(x);
            let phi = T::one() + *mass / (T::of(2.0) * r);
            let c = T::one() / phi.powi(4);
            let mut g = [[T::zero(); 3]; 3];
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = c;
            }
            g
        }
        MetricKind::HyperbolicPolar => {
            let y = linalg::sub(x, &chart.origin());
            let r = linalg::norm(&y);
            radial_profile_metric(&y, r, T::one(), T::one() / sinhc_sq(r))
        }
        MetricKind::AdsSchwarzschild { mass } => {
            let y = linalg::sub(x, &chart.origin());
            let r = linalg::norm(&y);
            let v = T::one() + r * r - T::of(2.0) * *mass / r;
            radial_profile_metric(&y, r, v, T::one())
        }
        MetricKind::Conformal(spec) => {
            let f = (spec.factor)(x);
            let gb = kind_metric_inverse(&spec.base, chart, x);
            let mut g = [[T::zero(); 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    g[i][j] = gb[i][j] / f;
                }
            }
            g
        }
    }
}

/// Closed-form (g, dg) for the model kinds. Conformal kinds are handled by
/// the finite-difference path.
fn kind_metric_deriv<T: Real>(
    kind: &MetricKind<T>,
    chart: &Chart<T>,
    x: &ChartPoint<T>,
) -> (Mat3<T>, [Mat3<T>; 3]) {
    let zero3 = [[T::zero(); 3]; 3];
    match kind {
        MetricKind::Euclidean => (linalg::identity3(), [zero3; 3]),
        MetricKind::Schwarzschild { mass } => {
            let r = linalg::norm(x);
            let phi = T::one() + *mass / (T::of(2.0) * r);
            let c = phi.powi(4);
            // dc/dx_k = 4 phi^3 phi' * x_k / r, phi' = -m/(2 r^2)
            let dphi_dr = -*mass / (T::of(2.0) * r * r);
            let dc_dr = T::of(4.0) * phi.powi(3) * dphi_dr;
            let mut g = zero3;
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = c;
            }
            let mut dg = [zero3; 3];
            for k in 0..3 {
                let dck = dc_dr * x[k] / r;
                for i in 0..3 {
                    dg[k][i][i] = dck;
                }
            }
            (g, dg)
        }
        MetricKind::HyperbolicPolar => {
            let y = linalg::sub(x, &chart.origin());
            let r = linalg::norm(&y);
            let (tan, dtan) = (sinhc_sq(r), sinhc_sq_deriv(r));
            radial_profile_metric_deriv(&y, r, T::one(), T::zero(), tan, dtan)
        }
        MetricKind::AdsSchwarzschild { mass } => {
            let y = linalg::sub(x, &chart.origin());
            let r = linalg::norm(&y);
            let v = T::one() + r * r - T::of(2.0) * *mass / r;
            let dv = T::of(2.0) * r + T::of(2.0) * *mass / (r * r);
            let rad = T::one() / v;
            let drad = -dv / (v * v);
            radial_profile_metric_deriv(&y, r, rad, drad, T::one(), T::zero())
        }
        MetricKind::Conformal(_) => {
            unreachable!("conformal kinds use the finite-difference jet")
        }
    }
}

/// g = tan * delta + (rad - tan) * yhat yhat^T
fn radial_profile_metric<T: Real>(y: &Vec3<T>, r: T, rad: T, tan: T) -> Mat3<T> {
    let mut g = [[T::zero(); 3]; 3];
    let diff = rad - tan;
    for i in 0..3 {
        for j in 0..3 {
            let yy = y[i] * y[j] / (r * r);
            g[i][j] = diff * yy;
        }
        g[i][i] = g[i][i] + tan;
    }
    g
}

fn radial_profile_metric_deriv<T: Real>(
    y: &Vec3<T>,
    r: T,
    rad: T,
    drad: T,
    tan: T,
    dtan: T,
) -> (Mat3<T>, [Mat3<T>; 3]) {
    let g = radial_profile_metric(y, r, rad, tan);
    let diff = rad - tan;
    let ddiff = drad - dtan;
    let mut yhat = [T::zero(); 3];
    for (h, &yi) in yhat.iter_mut().zip(y.iter()) {
        *h = yi / r;
    }
    let mut dg = [[[T::zero(); 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                // d yhat_i / d x_k = (delta_ik - yhat_i yhat_k) / r
                let dyi = (kron::<T>(i, k) - yhat[i] * yhat[k]) / r;
                let dyj = (kron::<T>(j, k) - yhat[j] * yhat[k]) / r;
                let mut v = dtan * yhat[k] * kron::<T>(i, j) + ddiff * yhat[k] * yhat[i] * yhat[j];
                v = v + diff * (dyi * yhat[j] + yhat[i] * dyj);
                dg[k][i][j] = v;
            }
        }
    }
    (g, dg)
}

#[inline]
fn kron<T: Real>(i: usize, j: usize) -> T {
    if i == j {
        T::one()
    } else {
        T::zero()
    }
}

/// (sinh r / r)^2 with a series branch near r = 0.
fn sinhc_sq<T: Real>(r: T) -> T {
    if r < T::of(1e-3) {
        let r2 = r * r;
        // 1 + r^2/3 + 2 r^4/45 + r^6/315
        T::one() + r2 * (T::of(1.0 / 3.0) + r2 * (T::of(2.0 / 45.0) + r2 * T::of(1.0 / 315.0)))
    } else {
        let s = r.sinh() / r;
        s * s
    }
}

/// d/dr (sinh r / r)^2.
fn sinhc_sq_deriv<T: Real>(r: T) -> T {
    if r < T::of(1e-3) {
        let r2 = r * r;
        // (2/3) r + (8/45) r^3 + (2/105) r^5
        r * (T::of(2.0 / 3.0) + r2 * (T::of(8.0 / 45.0) + r2 * T::of(2.0 / 105.0)))
    } else {
        ((T::of(2.0) * r).sinh() - T::of(2.0) * r.sinh() * r.sinh() / r) / (r * r)
    }
}


#[cfg(test)]
mod conformal_tests {
    use super::*;

    #[test]
    fn varying_conformal_factor_curvature_matches_closed_form() {
        // g = e^{2 psi} delta with psi = a/(1 + |x|^2):
        // R = -2 e^{-2 psi} (2 Lap psi + |grad psi|^2)
        let a = 0.3;
        let factor: ScalarField<f64> = Arc::new(move |x: &[f64; 3]| {
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            (2.0 * a / (1.0 + r2)).exp()
        });
        let spec = MetricSpec::conformal(factor, MetricSpec::euclidean(), DecayClass::Flat);
        let field = make_metric(spec).unwrap();
        for p in [[1.0, 0.0, 0.0], [0.5, -1.0, 2.0], [2.0, 1.0, 1.0]] {
            let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            let u = 1.0 / (1.0 + r2);
            let psi = a * u;
            let grad_sq = a * a * 4.0 * r2 * u.powi(4);
            let lap = a * (-6.0 * u * u + 8.0 * r2 * u.powi(3));
            let expected = -2.0 * (-2.0 * psi).exp() * (2.0 * lap + grad_sq);
            let curv = field.curvature_at(&p).unwrap();
            assert!(
                (curv.scalar - expected).abs() < 1e-5,
                "scalar {} vs {} at {p:?}",
                curv.scalar,
                expected
            );
        }
    }
}

#[cfg(test)]
mod boundary_tests {
    use super::*;

    #[test]
    fn curvature_stencil_respects_the_inner_boundary() {
        // the Richardson stencil reaches 2h past the probe point; close to
        // the horizon that exits the chart
        let field = make_metric(MetricSpec::schwarzschild(1.0)).unwrap();
        let h = default_fd_step::<f64>(); // 1e-4 at unit scale
        let near = [0.5 + h, 0.0, 0.0];
        assert!(matches!(field.curvature_at(&near), Err(Error::Domain(_))));
        let clear = [0.5 + 1.0, 0.0, 0.0];
        assert!(field.curvature_at(&clear).is_ok());
    }
}
