//! Star-shaped surfaces as radial graphs over a discretized sphere, and
//! their extrinsic geometry under an ambient metric.
//!
//! The grid is Gauss-Legendre in latitude (interior nodes only, so the
//! poles are never sampled) and uniform in longitude. Latitude derivatives
//! use barycentric collocation matrices in the variable x = cos(theta)
//! after splitting the field by half-turn parity: the even part of a smooth
//! sphere function is smooth in x, and the odd part is sin(theta) times a
//! function smooth in x. Both parts therefore differentiate spectrally.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use ndarray::{Array2, Zip};

use crate::ambient::{ChartPoint, MetricField};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat2, Vec3};
use crate::numerics::gauss::{gauss_legendre, gauss_legendre_on};
use crate::numerics::spectral::{
    barycentric_weights_gauss, diff_matrix, diff_matrix2, fourier_diff_matrices,
};
use crate::scalar::Real;
use crate::Regime;

static PARALLEL: AtomicBool = AtomicBool::new(false);

/// Enable rayon-parallel per-node geometry assembly. Off by default; the
/// caller owns the rayon thread-pool configuration.
pub fn set_parallel(enabled: bool) {
    PARALLEL.store(enabled, Ordering::Relaxed);
}

fn parallel_enabled() -> bool {
    PARALLEL.load(Ordering::Relaxed)
}

/// Gauss-Legendre x uniform-longitude sphere grid with differentiation
/// matrices and quadrature weights.
#[derive(Debug)]
pub struct SphereGrid<T> {
    n_lat: usize,
    n_lon: usize,
    /// cos(colatitude), ascending
    x: Vec<T>,
    theta: Vec<T>,
    sin_theta: Vec<T>,
    /// Gauss-Legendre weights in x
    gl_weights: Vec<T>,
    /// min adjacent colatitude gap per row
    theta_gap: Vec<T>,
    phi: Vec<T>,
    dir: Vec<[T; 3]>,       // node unit directions, row-major
    dir_theta: Vec<[T; 3]>, // d dir / d theta
    dir_phi: Vec<[T; 3]>,   // d dir / d phi
    dx1: Array2<T>,
    dx2: Array2<T>,
    dphi1_t: Array2<T>,
    dphi2_t: Array2<T>,
    lon_weight: T,
    ray_nodes: Vec<T>,
    ray_weights: Vec<T>,
    /// longitude mode cutoff per row (pole de-aliasing)
    lon_cutoff: Vec<usize>,
    /// effective longitude resolution pi / cutoff per row
    eff_dphi: Vec<T>,
    /// projection matrices keyed by cutoff, for rows with cutoff < n_lon/2
    lon_projectors: Vec<(usize, Array2<T>)>,
}

impl<T: Real> SphereGrid<T> {
    /// Build an `n_lat` x `n_lon` grid. Requires `n_lat >= 8` and even
    /// `n_lon >= 16`. The constructor validates its own quadrature on the
    /// round sphere.
    pub fn new(n_lat: usize, n_lon: usize) -> Result<Arc<Self>> {
        if n_lat < 8 {
            return Err(Error::InvalidConfig(format!(
                "n_lat = {n_lat} is below the minimum of 8"
            )));
        }
        if n_lon < 16 || !n_lon.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "n_lon = {n_lon} must be even and at least 16"
            )));
        }
        let (x, gl_weights) = gauss_legendre::<T>(n_lat);
        let lam = barycentric_weights_gauss(&x, &gl_weights);
        let dx1 = diff_matrix(&x, &lam);
        let dx2 = diff_matrix2(&x, &lam, &dx1);
        let (dphi1, dphi2) = fourier_diff_matrices::<T>(n_lon);
        let dphi1_t = dphi1.reversed_axes().as_standard_layout().to_owned();
        let dphi2_t = dphi2.reversed_axes().as_standard_layout().to_owned();

        let theta: Vec<T> = x.iter().map(|&xi| xi.acos()).collect();
        let sin_theta: Vec<T> = x.iter().map(|&xi| (T::one() - xi * xi).sqrt()).collect();
        let mut theta_gap = vec![T::zero(); n_lat];
        for i in 0..n_lat {
            let mut gap = T::infinity();
            if i > 0 {
                gap = gap.min((theta[i] - theta[i - 1]).abs());
            }
            if i + 1 < n_lat {
                gap = gap.min((theta[i + 1] - theta[i]).abs());
            }
            theta_gap[i] = gap;
        }
        let two_pi = T::of(2.0) * T::PI();
        let phi: Vec<T> = (0..n_lon)
            .map(|j| two_pi * T::of(j as f64) / T::of(n_lon as f64))
            .collect();

        let mut dir = Vec::with_capacity(n_lat * n_lon);
        let mut dir_theta = Vec::with_capacity(n_lat * n_lon);
        let mut dir_phi = Vec::with_capacity(n_lat * n_lon);
        for i in 0..n_lat {
            let (st, ct) = (sin_theta[i], x[i]);
            for &p in &phi {
                let (sp, cp) = (p.sin(), p.cos());
                dir.push([st * cp, st * sp, ct]);
                dir_theta.push([ct * cp, ct * sp, -st]);
                dir_phi.push([-st * sp, st * cp, T::zero()]);
            }
        }

        let (ray_nodes, ray_weights) = gauss_legendre_on::<T>(20, T::zero(), T::one());

        // Longitude modes above (n_lon/2) sin(theta) oscillate faster than
        // the local grid can represent; smooth sphere functions carry
        // sin(theta)^m of mode m there, so cutting at
        // max(8, (n_lon/2) sin(theta)) discards only O(sin(theta)^9)
        // content while lifting the pole constraint on explicit steps.
        let half_modes = n_lon / 2;
        let mut lon_cutoff = Vec::with_capacity(n_lat);
        let mut eff_dphi = Vec::with_capacity(n_lat);
        for &st in &sin_theta {
            let k = ((T::of(half_modes as f64) * st).ceil().f64() as usize).clamp(8, half_modes);
            lon_cutoff.push(k);
            eff_dphi.push(T::PI() / T::of(k as f64));
        }
        let mut cutoffs: Vec<usize> = lon_cutoff
            .iter()
            .copied()
            .filter(|&k| k < half_modes)
            .collect();
        cutoffs.sort_unstable();
        cutoffs.dedup();
        let mut lon_projectors = Vec::new();
        for k in cutoffs {
            let mut p = Array2::zeros((n_lon, n_lon));
            let inv_n = T::one() / T::of(n_lon as f64);
            for a in 0..n_lon {
                for b in 0..n_lon {
                    let delta = two_pi * T::of((a as f64) - (b as f64)) / T::of(n_lon as f64);
                    let mut v = T::one();
                    for m in 1..=k {
                        v = v + T::of(2.0) * (T::of(m as f64) * delta).cos();
                    }
                    p[[a, b]] = v * inv_n;
                }
            }
            lon_projectors.push((k, p));
        }

        let grid = SphereGrid {
            n_lat,
            n_lon,
            x,
            theta,
            sin_theta,
            gl_weights,
            theta_gap,
            phi,
            dir,
            dir_theta,
            dir_phi,
            dx1,
            dx2,
            dphi1_t,
            dphi2_t,
            lon_weight: two_pi / T::of(n_lon as f64),
            ray_nodes,
            ray_weights,
            lon_cutoff,
            eff_dphi,
            lon_projectors,
        };

        // quadrature self-check on the round sphere; the tolerance floor
        // covers lower-precision scalar types
        let tol = T::of(1e-12).max(T::epsilon() * T::of(100.0));
        let ones = Array2::from_elem((n_lat, n_lon), T::one());
        let four_pi = T::of(4.0) * T::PI();
        let total = grid.integrate_solid_angle(&ones);
        if (total - four_pi).abs() > tol * four_pi {
            return Err(Error::Internal(format!(
                "solid-angle quadrature defect: {:e}",
                (total - four_pi).f64()
            )));
        }
        let mut cos_field = Array2::zeros((n_lat, n_lon));
        for i in 0..n_lat {
            for j in 0..n_lon {
                cos_field[[i, j]] = grid.x[i];
            }
        }
        let moment = grid.integrate_solid_angle(&cos_field);
        if moment.abs() > tol {
            return Err(Error::Internal(format!(
                "first-moment quadrature defect: {:e}",
                moment.f64()
            )));
        }
        Ok(Arc::new(grid))
    }

    pub fn n_lat(&self) -> usize {
        self.n_lat
    }

    pub fn n_lon(&self) -> usize {
        self.n_lon
    }

    pub fn n_nodes(&self) -> usize {
        self.n_lat * self.n_lon
    }

    pub fn colatitudes(&self) -> &[T] {
        &self.theta
    }

    pub fn longitudes(&self) -> &[T] {
        &self.phi
    }

    pub fn sin_colatitudes(&self) -> &[T] {
        &self.sin_theta
    }

    /// Unit direction of node (i, j) in chart coordinates.
    pub fn direction(&self, i: usize, j: usize) -> Vec3<T> {
        self.dir[i * self.n_lon + j]
    }

    /// Integral over the unit sphere, integrand sampled at nodes.
    pub fn integrate_solid_angle(&self, vals: &Array2<T>) -> T {
        let mut total = T::zero();
        for i in 0..self.n_lat {
            let mut row = T::zero();
            for j in 0..self.n_lon {
                row = row + vals[[i, j]];
            }
            total = total + self.gl_weights[i] * row;
        }
        total * self.lon_weight
    }

    /// Integral of `vals` against d(theta) d(phi); `vals` must already
    /// contain any area element.
    pub fn integrate_theta_phi(&self, vals: &Array2<T>) -> T {
        let mut total = T::zero();
        for i in 0..self.n_lat {
            let mut row = T::zero();
            for j in 0..self.n_lon {
                row = row + vals[[i, j]];
            }
            total = total + self.gl_weights[i] / self.sin_theta[i] * row;
        }
        total * self.lon_weight
    }

    /// Split by half-turn parity: returns (even, odd/sin(theta)).
    fn parity_split(&self, f: &Array2<T>) -> (Array2<T>, Array2<T>) {
        let (n, m) = (self.n_lat, self.n_lon);
        let half = m / 2;
        let mut even = Array2::zeros((n, m));
        let mut odd_scaled = Array2::zeros((n, m));
        let h = T::of(0.5);
        for i in 0..n {
            let inv_st = T::one() / self.sin_theta[i];
            for j in 0..m {
                let k = (j + half) % m;
                let e = h * (f[[i, j]] + f[[i, k]]);
                even[[i, j]] = e;
                odd_scaled[[i, j]] = (f[[i, j]] - e) * inv_st;
            }
        }
        (even, odd_scaled)
    }

    /// First colatitude derivative.
    pub fn d_theta(&self, f: &Array2<T>) -> Array2<T> {
        let (even, v) = self.parity_split(f);
        let de = self.dx1.dot(&even);
        let dv = self.dx1.dot(&v);
        let mut out = Array2::zeros((self.n_lat, self.n_lon));
        for i in 0..self.n_lat {
            let (st, ct) = (self.sin_theta[i], self.x[i]);
            for j in 0..self.n_lon {
                out[[i, j]] = -st * de[[i, j]] + ct * v[[i, j]] - st * st * dv[[i, j]];
            }
        }
        out
    }

    /// First and second colatitude derivatives in one pass.
    pub fn d_theta2(&self, f: &Array2<T>) -> (Array2<T>, Array2<T>) {
        let (even, v) = self.parity_split(f);
        let de = self.dx1.dot(&even);
        let dde = self.dx2.dot(&even);
        let dv = self.dx1.dot(&v);
        let ddv = self.dx2.dot(&v);
        let mut d1 = Array2::zeros((self.n_lat, self.n_lon));
        let mut d2 = Array2::zeros((self.n_lat, self.n_lon));
        let three = T::of(3.0);
        for i in 0..self.n_lat {
            let (st, ct) = (self.sin_theta[i], self.x[i]);
            let st2 = st * st;
            for j in 0..self.n_lon {
                d1[[i, j]] = -st * de[[i, j]] + ct * v[[i, j]] - st2 * dv[[i, j]];
                d2[[i, j]] = st2 * dde[[i, j]]
                    - ct * de[[i, j]]
                    - st * v[[i, j]]
                    - three * st * ct * dv[[i, j]]
                    + st2 * st * ddv[[i, j]];
            }
        }
        (d1, d2)
    }

    /// First longitude derivative.
    pub fn d_phi(&self, f: &Array2<T>) -> Array2<T> {
        f.dot(&self.dphi1_t)
    }

    /// Second longitude derivative.
    pub fn d_phi_phi(&self, f: &Array2<T>) -> Array2<T> {
        f.dot(&self.dphi2_t)
    }

    /// Project out longitude modes above the per-row cutoff. Identity on
    /// fields whose near-pole longitudinal spectrum already decays like
    /// sin(theta)^m (every field smooth on the sphere).
    pub fn filter_longitude(&self, f: &mut Array2<T>) {
        for i in 0..self.n_lat {
            let k = self.lon_cutoff[i];
            if k >= self.n_lon / 2 {
                continue;
            }
            let proj = &self
                .lon_projectors
                .iter()
                .find(|(kk, _)| *kk == k)
                .expect("projector exists for every active cutoff")
                .1;
            let row: Vec<T> = (0..self.n_lon).map(|j| f[[i, j]]).collect();
            for a in 0..self.n_lon {
                let mut v = T::zero();
                for (b, &rb) in row.iter().enumerate() {
                    v = v + proj[[a, b]] * rb;
                }
                f[[i, a]] = v;
            }
        }
    }

    /// All surface derivatives of a node field.
    pub fn derivatives(&self, f: &Array2<T>) -> FieldDerivatives<T> {
        let (d_theta, d_theta_theta) = self.d_theta2(f);
        let d_phi = self.d_phi(f);
        let d_phi_phi = self.d_phi_phi(f);
        let d_theta_phi = self.d_theta(&d_phi);
        FieldDerivatives {
            d_theta,
            d_phi,
            d_theta_theta,
            d_theta_phi,
            d_phi_phi,
        }
    }
}

/// Partial derivatives of a scalar node field with respect to the sphere
/// parameters.
pub struct FieldDerivatives<T> {
    pub d_theta: Array2<T>,
    pub d_phi: Array2<T>,
    pub d_theta_theta: Array2<T>,
    pub d_theta_phi: Array2<T>,
    pub d_phi_phi: Array2<T>,
}

/// A closed star-shaped surface: radial graph `f` over a sphere grid about
/// a center point. Immutable once constructed.
#[derive(Clone, Debug)]
pub struct RadialSurface<T> {
    center: ChartPoint<T>,
    radii: Array2<T>,
    grid: Arc<SphereGrid<T>>,
}

impl<T: Real> RadialSurface<T> {
    pub fn new(center: ChartPoint<T>, radii: Array2<T>, grid: Arc<SphereGrid<T>>) -> Result<Self> {
        if radii.dim() != (grid.n_lat(), grid.n_lon()) {
            return Err(Error::InvalidConfig(format!(
                "radii shape {:?} does not match grid {}x{}",
                radii.dim(),
                grid.n_lat(),
                grid.n_lon()
            )));
        }
        if radii.iter().any(|r| !(*r > T::zero()) || !r.is_finite()) {
            return Err(Error::InvalidConfig(
                "all radii must be positive and finite".into(),
            ));
        }
        Ok(RadialSurface {
            center,
            radii,
            grid,
        })
    }

    /// Round coordinate sphere of radius `rho` about `center`.
    pub fn round(center: ChartPoint<T>, rho: T, grid: Arc<SphereGrid<T>>) -> Result<Self> {
        if !(rho > T::zero()) {
            return Err(Error::InvalidConfig(
                "sphere radius must be positive".into(),
            ));
        }
        let radii = Array2::from_elem((grid.n_lat(), grid.n_lon()), rho);
        RadialSurface::new(center, radii, grid)
    }

    /// Graph built from a function of (colatitude, longitude).
    pub fn from_polar_fn(
        center: ChartPoint<T>,
        grid: Arc<SphereGrid<T>>,
        f: impl Fn(T, T) -> T,
    ) -> Result<Self> {
        let mut radii = Array2::zeros((grid.n_lat(), grid.n_lon()));
        for i in 0..grid.n_lat() {
            for j in 0..grid.n_lon() {
                radii[[i, j]] = f(grid.colatitudes()[i], grid.longitudes()[j]);
            }
        }
        RadialSurface::new(center, radii, grid)
    }

    pub fn center(&self) -> ChartPoint<T> {
        self.center
    }

    pub fn radii(&self) -> &Array2<T> {
        &self.radii
    }

    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    /// Chart position of node (i, j).
    pub fn position(&self, i: usize, j: usize) -> ChartPoint<T> {
        let w = self.grid.direction(i, j);
        let f = self.radii[[i, j]];
        [
            self.center[0] + f * w[0],
            self.center[1] + f * w[1],
            self.center[2] + f * w[2],
        ]
    }

    /// New surface with transformed radii (flow steps use this).
    pub fn with_radii(&self, radii: Array2<T>) -> Result<Self> {
        RadialSurface::new(self.center, radii, self.grid.clone())
    }

    /// max(f) / min(f): chart-radial eccentricity about the center.
    pub fn eccentricity(&self) -> T {
        let mut lo = T::infinity();
        let mut hi = T::zero();
        for &r in self.radii.iter() {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        hi / lo
    }

    /// (ln sinh)-eccentricity, defined only when min(f) > 1.
    pub fn ln_sinh_eccentricity(&self) -> Option<T> {
        let mut lo = T::infinity();
        let mut hi = T::zero();
        for &r in self.radii.iter() {
            lo = lo.min(r);
            hi = hi.max(r);
        }
        if lo <= T::one() {
            return None;
        }
        Some(hi.sinh().ln() / lo.sinh().ln())
    }
}

/// Pointwise extrinsic geometry of a surface under an ambient metric, plus
/// the aggregates needed by the flow monitor and diagnostics.
#[derive(Clone, Debug)]
pub struct SurfaceGeometry<T> {
    grid: Arc<SphereGrid<T>>,
    /// induced metric components
    pub g_tt: Array2<T>,
    pub g_tp: Array2<T>,
    pub g_pp: Array2<T>,
    /// second fundamental form components
    pub h_tt: Array2<T>,
    pub h_tp: Array2<T>,
    pub h_pp: Array2<T>,
    /// sqrt(det induced metric): area element against d(theta) d(phi)
    pub sqrt_det: Array2<T>,
    pub mean_h: Array2<T>,
    pub b_norm: Array2<T>,
    /// support value g(x - p, nu)
    pub support: Array2<T>,
    /// star margin g(radial unit, nu)
    pub margin: Array2<T>,
    /// g(coordinate radial direction, nu): radial-to-normal speed factor
    pub radial_conv: Array2<T>,
    pub normal: [Array2<T>; 3],
    pub area: T,
    pub h_min: T,
    pub h_max: T,
    pub b_norm_max: T,
    pub margin_min: T,
    /// min over nodes of the local surface grid spacing
    pub min_spacing: T,
}

impl<T: Real> SurfaceGeometry<T> {
    pub fn grid(&self) -> &Arc<SphereGrid<T>> {
        &self.grid
    }

    /// Integral over the surface of a per-node field.
    pub fn integrate(&self, vals: &Array2<T>) -> T {
        let mut weighted = vals.clone();
        Zip::from(&mut weighted)
            .and(&self.sqrt_det)
            .for_each(|v, &s| *v = *v * s);
        self.grid.integrate_theta_phi(&weighted)
    }

    /// Integral over the surface of a function of the node indices.
    pub fn integrate_nodes(&self, f: impl Fn(usize, usize) -> T) -> T {
        let mut vals = Array2::zeros((self.grid.n_lat(), self.grid.n_lon()));
        for i in 0..self.grid.n_lat() {
            for j in 0..self.grid.n_lon() {
                vals[[i, j]] = f(i, j) * self.sqrt_det[[i, j]];
            }
        }
        self.grid.integrate_theta_phi(&vals)
    }

    /// Laplace-Beltrami of a node field in the induced metric.
    pub fn laplace_beltrami(&self, u: &Array2<T>) -> Array2<T> {
        let (n, m) = (self.grid.n_lat(), self.grid.n_lon());
        let du_t = self.grid.d_theta(u);
        let du_p = self.grid.d_phi(u);
        let mut flux_t = Array2::zeros((n, m));
        let mut flux_p = Array2::zeros((n, m));
        for i in 0..n {
            for j in 0..m {
                let det = self.sqrt_det[[i, j]];
                let gtt = self.g_tt[[i, j]];
                let gtp = self.g_tp[[i, j]];
                let gpp = self.g_pp[[i, j]];
                let inv_det2 = T::one() / (gtt * gpp - gtp * gtp);
                let (itt, itp, ipp) = (gpp * inv_det2, -gtp * inv_det2, gtt * inv_det2);
                flux_t[[i, j]] = det * (itt * du_t[[i, j]] + itp * du_p[[i, j]]);
                flux_p[[i, j]] = det * (itp * du_t[[i, j]] + ipp * du_p[[i, j]]);
            }
        }
        let div_t = self.grid.d_theta(&flux_t);
        let div_p = self.grid.d_phi(&flux_p);
        let mut out = Array2::zeros((n, m));
        for i in 0..n {
            for j in 0..m {
                out[[i, j]] = (div_t[[i, j]] + div_p[[i, j]]) / self.sqrt_det[[i, j]];
            }
        }
        out
    }
}

struct NodeOut<T> {
    g_tt: T,
    g_tp: T,
    g_pp: T,
    h_tt: T,
    h_tp: T,
    h_pp: T,
    sqrt_det: T,
    mean_h: T,
    b_norm: T,
    support: T,
    margin: T,
    radial_conv: T,
    normal: [T; 3],
    spacing: T,
}

/// Assemble the full extrinsic geometry of `s` under `field`.
pub fn geometry<T: Real>(
    s: &RadialSurface<T>,
    field: &MetricField<T>,
) -> Result<SurfaceGeometry<T>> {
    let grid = s.grid().clone();
    let (n, m) = (grid.n_lat(), grid.n_lon());
    let f = s.radii();
    let d = grid.derivatives(f);
    let center = s.center();

    let node = |i: usize, j: usize| -> Result<NodeOut<T>> {
        let idx = i * m + j;
        let w = grid.dir[idx];
        let wt = grid.dir_theta[idx];
        let wp = grid.dir_phi[idx];
        let fv = f[[i, j]];
        let ft = d.d_theta[[i, j]];
        let fp = d.d_phi[[i, j]];
        let ftt = d.d_theta_theta[[i, j]];
        let ftp = d.d_theta_phi[[i, j]];
        let fpp = d.d_phi_phi[[i, j]];
        let (st, ct) = (grid.sin_theta[i], grid.x[i]);

        let pos = [
            center[0] + fv * w[0],
            center[1] + fv * w[1],
            center[2] + fv * w[2],
        ];
        let jet = field.jet(&pos)?;
        let gamma = crate::ambient::christoffel_from_jet(&jet);

        // tangents
        let xt = [
            ft * w[0] + fv * wt[0],
            ft * w[1] + fv * wt[1],
            ft * w[2] + fv * wt[2],
        ];
        let xp = [
            fp * w[0] + fv * wp[0],
            fp * w[1] + fv * wp[1],
            fp * w[2] + fv * wp[2],
        ];

        // second parameter derivatives of the embedding:
        // w_theta_theta = -w, w_theta_phi = (-ct sp, ct cp, 0), w_phi_phi = (-st cp, -st sp, 0)
        let (sp, cp) = ((grid.phi[j]).sin(), (grid.phi[j]).cos());
        let wtt = [-w[0], -w[1], -w[2]];
        let wtp = [-ct * sp, ct * cp, T::zero()];
        let wpp = [-st * cp, -st * sp, T::zero()];
        let two = T::of(2.0);
        let xtt = [
            ftt * w[0] + two * ft * wt[0] + fv * wtt[0],
            ftt * w[1] + two * ft * wt[1] + fv * wtt[1],
            ftt * w[2] + two * ft * wt[2] + fv * wtt[2],
        ];
        let xtp = [
            ftp * w[0] + ft * wp[0] + fp * wt[0] + fv * wtp[0],
            ftp * w[1] + ft * wp[1] + fp * wt[1] + fv * wtp[1],
            ftp * w[2] + ft * wp[2] + fp * wt[2] + fv * wtp[2],
        ];
        let xpp = [
            fpp * w[0] + two * fp * wp[0] + fv * wpp[0],
            fpp * w[1] + two * fp * wp[1] + fv * wpp[1],
            fpp * w[2] + two * fp * wp[2] + fv * wpp[2],
        ];

        // induced metric
        let g_tt = linalg::pair(&jet.g, &xt, &xt);
        let g_tp = linalg::pair(&jet.g, &xt, &xp);
        let g_pp = linalg::pair(&jet.g, &xp, &xp);
        let det2 = g_tt * g_pp - g_tp * g_tp;
        if !(det2 > T::zero()) || !det2.is_finite() {
            return Err(Error::DegenerateSurface(format!(
                "induced metric determinant {:e} at node ({i}, {j})",
                det2.f64()
            )));
        }
        let sqrt_det = det2.sqrt();
        let inv_det2 = T::one() / det2;
        let (itt, itp, ipp) = (g_pp * inv_det2, -g_tp * inv_det2, g_tt * inv_det2);

        // normal covector n_k = eps_{kab} xt^a xp^b; raise and normalize in g
        let n_cov = linalg::cross(&xt, &xp);
        let n_vec = linalg::mat_vec(&jet.g_inv, &n_cov);
        let n_norm = linalg::dot(&n_cov, &n_vec).sqrt();
        let nu = linalg::scale(T::one() / n_norm, &n_vec);

        // ambient covariant second derivatives paired with the normal
        let mut h = [T::zero(); 3]; // tt, tp, pp
        for (slot, (xa, xb, xab)) in [(&xt, &xt, &xtt), (&xt, &xp, &xtp), (&xp, &xp, &xpp)]
            .iter()
            .enumerate()
        {
            let mut val = T::zero();
            for k in 0..3 {
                let mut wk = xab[k];
                for a in 0..3 {
                    for b in 0..3 {
                        wk = wk + gamma[k][a][b] * xa[a] * xb[b];
                    }
                }
                val = val + wk * n_cov[k];
            }
            h[slot] = -val / n_norm;
        }
        let (h_tt, h_tp, h_pp) = (h[0], h[1], h[2]);

        // shape operator M = g^{-1} h; H = tr M, |B|^2 = tr(M M)
        let m00 = itt * h_tt + itp * h_tp;
        let m01 = itt * h_tp + itp * h_pp;
        let m10 = itp * h_tt + ipp * h_tp;
        let m11 = itp * h_tp + ipp * h_pp;
        let mean_h = m00 + m11;
        let b2 = m00 * m00 + two * m01 * m10 + m11 * m11;

        // radial data
        let conv = linalg::dot(&w, &n_cov) / n_norm; // g(omega, nu)
        let w_len = linalg::pair(&jet.g, &w, &w).sqrt();
        let margin = conv / w_len;
        let support = fv * conv;

        let spacing_t = g_tt.sqrt() * grid.theta_gap[i];
        let spacing_p = g_pp.sqrt() * grid.eff_dphi[i];
        Ok(NodeOut {
            g_tt,
            g_tp,
            g_pp,
            h_tt,
            h_tp,
            h_pp,
            sqrt_det,
            mean_h,
            b_norm: b2.max(T::zero()).sqrt(),
            support,
            margin,
            radial_conv: conv,
            normal: nu,
            spacing: spacing_t.min(spacing_p),
        })
    };

    let outs: Vec<Result<NodeOut<T>>> = if parallel_enabled() {
        use rayon::prelude::*;
        (0..n * m)
            .into_par_iter()
            .map(|idx| node(idx / m, idx % m))
            .collect()
    } else {
        (0..n * m).map(|idx| node(idx / m, idx % m)).collect()
    };

    let mut geom = SurfaceGeometry {
        grid: grid.clone(),
        g_tt: Array2::zeros((n, m)),
        g_tp: Array2::zeros((n, m)),
        g_pp: Array2::zeros((n, m)),
        h_tt: Array2::zeros((n, m)),
        h_tp: Array2::zeros((n, m)),
        h_pp: Array2::zeros((n, m)),
        sqrt_det: Array2::zeros((n, m)),
        mean_h: Array2::zeros((n, m)),
        b_norm: Array2::zeros((n, m)),
        support: Array2::zeros((n, m)),
        margin: Array2::zeros((n, m)),
        radial_conv: Array2::zeros((n, m)),
        normal: [
            Array2::zeros((n, m)),
            Array2::zeros((n, m)),
            Array2::zeros((n, m)),
        ],
        area: T::zero(),
        h_min: T::infinity(),
        h_max: T::neg_infinity(),
        b_norm_max: T::zero(),
        margin_min: T::infinity(),
        min_spacing: T::infinity(),
    };

    for (idx, out) in outs.into_iter().enumerate() {
        let out = out?;
        let ij = [idx / m, idx % m];
        geom.g_tt[ij] = out.g_tt;
        geom.g_tp[ij] = out.g_tp;
        geom.g_pp[ij] = out.g_pp;
        geom.h_tt[ij] = out.h_tt;
        geom.h_tp[ij] = out.h_tp;
        geom.h_pp[ij] = out.h_pp;
        geom.sqrt_det[ij] = out.sqrt_det;
        geom.mean_h[ij] = out.mean_h;
        geom.b_norm[ij] = out.b_norm;
        geom.support[ij] = out.support;
        geom.margin[ij] = out.margin;
        geom.radial_conv[ij] = out.radial_conv;
        for k in 0..3 {
            geom.normal[k][ij] = out.normal[k];
        }
        geom.h_min = geom.h_min.min(out.mean_h);
        geom.h_max = geom.h_max.max(out.mean_h);
        geom.b_norm_max = geom.b_norm_max.max(out.b_norm);
        geom.margin_min = geom.margin_min.min(out.margin);
        geom.min_spacing = geom.min_spacing.min(out.spacing);
    }
    geom.area = grid.integrate_theta_phi(&geom.sqrt_det);
    Ok(geom)
}

/// Surface area.
pub fn area<T: Real>(geom: &SurfaceGeometry<T>) -> T {
    geom.area
}

/// Enclosed volume by radial quadrature from the surface center.
///
/// When the metric has an inner boundary (a horizon radius about the chart
/// origin), the enclosed region is measured relative to that boundary: ray
/// segments inside the excluded ball do not contribute.
pub fn enclosed_volume<T: Real>(s: &RadialSurface<T>, field: &MetricField<T>) -> Result<T> {
    let grid = s.grid();
    let (n, m) = (grid.n_lat(), grid.n_lon());
    let center = s.center();
    let r0 = field.inner_radius();
    let origin = field.chart_origin();
    let rel = linalg::sub(&center, &origin);
    let dist2 = linalg::dot(&rel, &rel);

    let mut shell = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            let w = grid.direction(i, j);
            let f = s.radii()[[i, j]];
            // admissible segments of [0, f] staying outside the excluded ball
            let mut segments: [(T, T); 2] = [(T::zero(), f), (T::zero(), T::zero())];
            let mut n_seg = 1;
            if r0 > T::zero() {
                let b = linalg::dot(&rel, &w);
                let c = dist2 - r0 * r0;
                let disc = b * b - c;
                if disc > T::zero() {
                    let sq = disc.sqrt();
                    let t_in = (-b - sq).max(T::zero());
                    let t_out = (-b + sq).min(f);
                    if t_out > t_in {
                        n_seg = 0;
                        if t_in > T::zero() {
                            segments[n_seg] = (T::zero(), t_in);
                            n_seg += 1;
                        }
                        if t_out < f {
                            segments[n_seg] = (t_out, f);
                            n_seg += 1;
                        }
                    }
                }
            }
            let mut ray = T::zero();
            for &(a, b) in segments.iter().take(n_seg) {
                let len = b - a;
                if len <= T::zero() {
                    continue;
                }
                for (&u, &wu) in grid.ray_nodes.iter().zip(&grid.ray_weights) {
                    let t = a + len * u;
                    let p = [
                        center[0] + t * w[0],
                        center[1] + t * w[1],
                        center[2] + t * w[2],
                    ];
                    ray = ray + len * wu * t * t * field.sqrt_det(&p)?;
                }
            }
            shell[[i, j]] = ray;
        }
    }
    Ok(grid.integrate_solid_angle(&shell))
}

/// Hawking mass of a surface from its geometry.
///
/// Flat regime: sqrt(A)/(16 pi)^{3/2} (16 pi - int H^2); the hyperbolic
/// variant replaces H^2 by H^2 - 4.
pub fn hawking_mass<T: Real>(geom: &SurfaceGeometry<T>, regime: Regime) -> T {
    let sixteen_pi = T::of(16.0) * T::PI();
    let int_h2 = geom.integrate_nodes(|i, j| {
        let h = geom.mean_h[[i, j]];
        match regime {
            Regime::Flat => h * h,
            Regime::Hyperbolic => h * h - T::of(4.0),
        }
    });
    (geom.area / sixteen_pi).sqrt() / sixteen_pi * (sixteen_pi - int_h2)
}

/// Minimum over nodes of the star margin g(radial unit, nu).
pub fn star_margin<T: Real>(geom: &SurfaceGeometry<T>) -> T {
    geom.margin_min
}

/// Integrals of powers of H used by the Holder-chain diagnostics.
pub fn curvature_integrals<T: Real>(geom: &SurfaceGeometry<T>) -> (T, T) {
    let int_h2 = geom.integrate_nodes(|i, j| geom.mean_h[[i, j]] * geom.mean_h[[i, j]]);
    let int_h_inv = geom.integrate_nodes(|i, j| T::one() / geom.mean_h[[i, j]]);
    (int_h2, int_h_inv)
}

/// Inverse of the 2x2 induced metric at a node.
pub fn induced_inverse<T: Real>(geom: &SurfaceGeometry<T>, i: usize, j: usize) -> Mat2<T> {
    let gtt = geom.g_tt[[i, j]];
    let gtp = geom.g_tp[[i, j]];
    let gpp = geom.g_pp[[i, j]];
    let inv_det = T::one() / (gtt * gpp - gtp * gtp);
    [
        [gpp * inv_det, -gtp * inv_det],
        [-gtp * inv_det, gtt * inv_det],
    ]
}
