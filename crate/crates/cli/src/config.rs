//! Run configuration: a single TOML document with metric, initial-surface,
//! flow, analysis, and output sections.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use starflow_core::ambient::{make_metric, DecayClass, MetricField, MetricSpec};
use starflow_core::flow::FlowConfig;
use starflow_core::io::load_surface;
use starflow_core::surface::{RadialSurface, SphereGrid};
use starflow_core::Regime;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigDoc {
    pub metric: MetricSection,
    pub initial: InitialSection,
    pub flow: FlowSection,
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricSection {
    pub kind: String,
    pub mass: Option<f64>,
    pub origin: Option<[f64; 3]>,
    /// conformal kinds: constant factor and base model
    pub factor: Option<f64>,
    pub base: Option<String>,
    pub base_mass: Option<f64>,
    pub decay: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default)]
    pub center: [f64; 3],
    pub radius: Option<f64>,
    pub radii_file: Option<PathBuf>,
    pub grid: [usize; 2],
    #[serde(default)]
    pub presmooth_epsilon: f64,
    #[serde(default)]
    pub presmooth_steps: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSection {
    pub t_end: f64,
    #[serde(default = "default_iota_min")]
    pub iota_min: f64,
    #[serde(default = "default_b_max")]
    pub b_max: f64,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    #[serde(default = "default_dt_max")]
    pub dt_max: f64,
    #[serde(default = "default_record_every")]
    pub record_every: f64,
}

fn default_iota_min() -> f64 {
    0.1
}
fn default_b_max() -> f64 {
    50.0
}
fn default_cfl() -> f64 {
    0.5
}
fn default_dt_max() -> f64 {
    1e-2
}
fn default_record_every() -> f64 {
    1e-2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    pub regime: String,
    #[serde(default)]
    pub c: Vec<f64>,
    #[serde(default = "default_true")]
    pub geroch: bool,
    #[serde(default = "default_true")]
    pub isoperimetric: bool,
    #[serde(default)]
    pub evolution: bool,
    #[serde(default)]
    pub floor_fit: bool,
    #[serde(default = "default_true")]
    pub sweepout: bool,
    #[serde(default)]
    pub target_volume: f64,
    #[serde(default = "default_evolution_tolerance")]
    pub evolution_tolerance: f64,
}

fn default_true() -> bool {
    true
}
fn default_evolution_tolerance() -> f64 {
    1e-2
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    #[serde(default)]
    pub checkpoint_every: f64,
}

/// Fully validated run plan.
pub struct RunPlan {
    pub field: MetricField<f64>,
    pub initial: RadialSurface<f64>,
    pub flow: FlowConfig<f64>,
    pub regime: Regime,
    pub c_values: Vec<f64>,
    pub geroch: bool,
    pub isoperimetric: bool,
    pub evolution: bool,
    pub floor_fit: bool,
    pub sweepout: bool,
    pub target_volume: f64,
    pub evolution_tolerance: f64,
    pub presmooth_epsilon: f64,
    pub presmooth_steps: usize,
    pub out_dir: PathBuf,
    pub checkpoint_every: f64,
}

pub fn parse_config(path: &Path) -> Result<RunConfigDoc> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

fn metric_spec(section: &MetricSection) -> Result<MetricSpec<f64>> {
    let origin = section.origin.unwrap_or([0.0; 3]);
    let base_spec = |kind: &str, mass: Option<f64>| -> Result<MetricSpec<f64>> {
        match kind {
            "euclidean" => Ok(MetricSpec::euclidean()),
            "schwarzschild" => {
                let m = mass.ok_or_else(|| anyhow!("metric.mass: required for schwarzschild"))?;
                Ok(MetricSpec::schwarzschild(m))
            }
            "hyperbolic" | "hyperbolic-polar" => {
                let mut spec = MetricSpec::hyperbolic();
                spec.chart = starflow_core::ambient::Chart::GeodesicPolar { origin };
                Ok(spec)
            }
            "ads-schwarzschild" => {
                let m =
                    mass.ok_or_else(|| anyhow!("metric.mass: required for ads-schwarzschild"))?;
                let mut spec = MetricSpec::ads_schwarzschild(m);
                spec.chart = starflow_core::ambient::Chart::GeodesicPolar { origin };
                Ok(spec)
            }
            other => bail!(
                "metric.kind: unknown kind {other:?} (expected euclidean, schwarzschild, \
                 hyperbolic, ads-schwarzschild, conformal)"
            ),
        }
    };
    if section.kind == "conformal" {
        let factor = section
            .factor
            .ok_or_else(|| anyhow!("metric.factor: required for conformal kinds"))?;
        if !(factor > 0.0) {
            bail!("metric.factor: must be positive, got {factor}");
        }
        let base_kind = section
            .base
            .as_deref()
            .ok_or_else(|| anyhow!("metric.base: required for conformal kinds"))?;
        let base = base_spec(base_kind, section.base_mass)?;
        let decay = match section.decay.as_deref() {
            Some("flat") => DecayClass::Flat,
            Some("hyperbolic") => DecayClass::Hyperbolic,
            Some(other) => {
                bail!("metric.decay: expected \"flat\" or \"hyperbolic\", got {other:?}")
            }
            None => bail!("metric.decay: required for conformal kinds"),
        };
        Ok(MetricSpec::conformal(
            Arc::new(move |_: &[f64; 3]| factor),
            base,
            decay,
        ))
    } else {
        base_spec(&section.kind, section.mass)
    }
}

fn metric_regime(section: &MetricSection) -> Result<Regime> {
    Ok(match section.kind.as_str() {
        "euclidean" | "schwarzschild" => Regime::Flat,
        "hyperbolic" | "hyperbolic-polar" | "ads-schwarzschild" => Regime::Hyperbolic,
        "conformal" => match section.decay.as_deref() {
            Some("flat") => Regime::Flat,
            Some("hyperbolic") => Regime::Hyperbolic,
            _ => bail!("metric.decay: required for conformal kinds"),
        },
        other => bail!("metric.kind: unknown kind {other:?}"),
    })
}

/// Validate the document and build every runtime object.
pub fn build_plan(doc: &RunConfigDoc, config_dir: &Path) -> Result<RunPlan> {
    let spec = metric_spec(&doc.metric)?;
    let metric_reg = metric_regime(&doc.metric)?;
    let field = make_metric(spec).map_err(|e| anyhow!("metric: {e}"))?;

    let regime = match doc.analysis.regime.as_str() {
        "flat" => Regime::Flat,
        "hyperbolic" => Regime::Hyperbolic,
        other => bail!("analysis.regime: expected \"flat\" or \"hyperbolic\", got {other:?}"),
    };
    if regime != metric_reg {
        bail!(
            "analysis.regime: {} is inconsistent with metric.kind {:?} (its regime is {})",
            regime,
            doc.metric.kind,
            metric_reg
        );
    }
    for &c in &doc.analysis.c {
        match regime {
            Regime::Flat => {
                if !(c > 0.0) {
                    bail!("analysis.c: flat regime requires c > 0, got {c}");
                }
            }
            Regime::Hyperbolic => {
                if !(c > 2.0) {
                    bail!(
                        "analysis.c: hyperbolic regime requires c > 2 (no closed surfaces of \
                         constant mean curvature at most 2 exist there), got {c}"
                    );
                }
            }
        }
    }

    let [n_lat, n_lon] = doc.initial.grid;
    let grid = SphereGrid::new(n_lat, n_lon).map_err(|e| anyhow!("initial.grid: {e}"))?;
    let initial = match (&doc.initial.radius, &doc.initial.radii_file) {
        (Some(r), None) => RadialSurface::round(doc.initial.center, *r, grid)
            .map_err(|e| anyhow!("initial.radius: {e}"))?,
        (None, Some(file)) => {
            let path = if file.is_absolute() {
                file.clone()
            } else {
                config_dir.join(file)
            };
            let s: RadialSurface<f64> =
                load_surface(&path).map_err(|e| anyhow!("initial.radii_file: {e}"))?;
            if s.grid().n_lat() != n_lat || s.grid().n_lon() != n_lon {
                bail!(
                    "initial.radii_file: surface grid {}x{} does not match initial.grid {}x{}",
                    s.grid().n_lat(),
                    s.grid().n_lon(),
                    n_lat,
                    n_lon
                );
            }
            if s.center() != doc.initial.center {
                bail!("initial.radii_file: surface center does not match initial.center");
            }
            s
        }
        (Some(_), Some(_)) => bail!("initial: set exactly one of radius or radii_file"),
        (None, None) => bail!("initial: one of radius or radii_file is required"),
    };
    if doc.initial.presmooth_epsilon < 0.0 {
        bail!("initial.presmooth_epsilon: must be non-negative");
    }

    let flow = FlowConfig {
        t_end: doc.flow.t_end,
        monitor: starflow_core::flow::MonitorConfig {
            iota_min: doc.flow.iota_min,
            b_max: doc.flow.b_max,
        },
        stepper: starflow_core::flow::StepperConfig {
            cfl_safety: doc.flow.cfl_safety,
            dt_max: doc.flow.dt_max,
        },
        record_every: doc.flow.record_every,
    };
    flow.validate().map_err(|e| anyhow!("flow: {e}"))?;

    if doc.analysis.target_volume < 0.0 {
        bail!("analysis.target_volume: must be non-negative");
    }
    if !(doc.analysis.evolution_tolerance > 0.0) {
        bail!("analysis.evolution_tolerance: must be positive");
    }
    if doc.output.checkpoint_every < 0.0 {
        bail!("output.checkpoint_every: must be non-negative");
    }

    Ok(RunPlan {
        field,
        initial,
        flow,
        regime,
        c_values: doc.analysis.c.clone(),
        geroch: doc.analysis.geroch,
        isoperimetric: doc.analysis.isoperimetric,
        evolution: doc.analysis.evolution,
        floor_fit: doc.analysis.floor_fit,
        sweepout: doc.analysis.sweepout,
        target_volume: doc.analysis.target_volume,
        evolution_tolerance: doc.analysis.evolution_tolerance,
        presmooth_epsilon: doc.initial.presmooth_epsilon,
        presmooth_steps: doc.initial.presmooth_steps,
        out_dir: doc
            .output
            .directory
            .clone()
            .unwrap_or_else(|| PathBuf::from(".")),
        checkpoint_every: doc.output.checkpoint_every,
    })
}
