//! Numerical laboratory for inverse mean curvature flow and mean curvature
//! flow of star-shaped surfaces in model asymptotically flat and
//! asymptotically hyperbolic 3-manifolds.
//!
//! The crate is organized around the pipeline
//! `ambient` (metrics) -> `surface` (discretized star-shaped surfaces and
//! their extrinsic geometry) -> `flow` (explicit IMCF/MCF time stepping)
//! -> `diagnostics` / `sweepout` (monotonicity laws, isoperimetric ratios,
//! and min-max reference values evaluated along flow traces).
//!
//! All numerics are generic over the scalar type via [`scalar::Real`];
//! concrete `f64` aliases live at the crate root.
//!
//! ```
//! use starflow_core::ambient::{make_metric, MetricSpec};
//! use starflow_core::diagnostics::geroch_report;
//! use starflow_core::flow::{run_imcf, FlowConfig};
//! use starflow_core::surface::{RadialSurface, SphereGrid};
//! use starflow_core::Regime;
//!
//! let field = make_metric(MetricSpec::schwarzschild(1.0))?;
//! let grid = SphereGrid::new(8, 16)?;
//! let sphere = RadialSurface::round([0.0; 3], 5.0, grid)?;
//! let trace = run_imcf(sphere, &field, &FlowConfig::new(0.05));
//! assert!(trace.completed());
//!
//! // centered coordinate spheres carry Hawking mass equal to the
//! // background mass, and it never decreases along the flow
//! let report = geroch_report(&trace, Regime::Flat, None)?;
//! assert!(report.monotone);
//! let mass: f64 = trace.samples[0].row.m_h;
//! assert!((mass - 1.0).abs() < 1e-2);
//! # Ok::<(), starflow_core::Error>(())
//! ```

// indexed loops are the readable form for fixed-size tensor algebra, and
// `!(x > 0)` guards reject NaN on purpose
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ambient;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod io;
pub mod linalg;
pub mod numerics;
pub mod scalar;
pub mod surface;
pub mod sweepout;

pub use error::{Error, Result};
pub use scalar::Real;

/// Configure intra-step parallelism: `n <= 1` keeps every kernel serial,
/// larger values build a global rayon pool of that size and enable the
/// parallel per-node geometry path. Call once at startup.
pub fn configure_threads(n: usize) {
    if n > 1 {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
        surface::set_parallel(true);
    } else {
        surface::set_parallel(false);
    }
}

/// Asymptotic regime of an ambient metric.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Flat,
    Hyperbolic,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Flat => write!(f, "flat"),
            Regime::Hyperbolic => write!(f, "hyperbolic"),
        }
    }
}

/// Concrete `f64` aliases for the main domain types.
pub type MetricSpec64 = ambient::MetricSpec<f64>;
pub type MetricField64 = ambient::MetricField<f64>;
pub type CurvatureValue64 = ambient::CurvatureValue<f64>;
pub type SphereGrid64 = surface::SphereGrid<f64>;
pub type RadialSurface64 = surface::RadialSurface<f64>;
pub type SurfaceGeometry64 = surface::SurfaceGeometry<f64>;
pub type FlowConfig64 = flow::FlowConfig<f64>;
pub type FlowTrace64 = flow::FlowTrace<f64>;
pub type DiagnosticsRow64 = diagnostics::DiagnosticsRow<f64>;
pub type SweepOutRecord64 = sweepout::SweepOutRecord<f64>;
