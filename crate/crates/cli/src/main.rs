//! starflow: run geometric flows in model backgrounds and check the
//! quantitative machinery along the way.

// numerical guards use `!(x > 0)` to reject NaN; index loops are the
// readable form for the small tensor checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

mod config;
mod csv;
mod report;
mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use starflow_core::diagnostics::{
    evolution_consistency, geroch_report, isoperimetric_report, mean_curvature_floor_fit,
};
use starflow_core::flow::{run_imcf, run_mcf_smoothing, FlowStatus};
use starflow_core::surface::{geometry, RadialSurface, SphereGrid};
use starflow_core::sweepout::{
    hyperbolic_ball, hyperbolic_max_radius, omega_c_reference, sweepout_report,
};
use starflow_core::Regime;

use config::RunPlan;
use report::CheckRecord;

#[derive(Parser)]
#[command(
    name = "starflow",
    version,
    about = "Geometric flow laboratory for star-shaped surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a configured flow run with diagnostics and reports
    Run {
        /// Path to the TOML run configuration
        #[arg(long)]
        config: PathBuf,
        /// Output directory override
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid override, e.g. 48x96
        #[arg(long)]
        grid: Option<String>,
        /// Suppress the human-readable summary
        #[arg(long)]
        quiet: bool,
    },
    /// Print min-max reference values
    Reference {
        /// "flat" or "hyperbolic"
        regime: String,
        c: f64,
    },
    /// Parse and validate a configuration without running it
    CheckConfig {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the model-metric and surface-kernel self-test battery
    Validate {
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("STARFLOW_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) => starflow_core::configure_threads(n),
            Err(_) => {
                eprintln!("error: STARFLOW_THREADS must be an integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run {
            config,
            out,
            grid,
            quiet,
        } => run_command(&config, out, grid, quiet),
        Command::Reference { regime, c } => reference_command(&regime, c),
        Command::CheckConfig { config } => {
            let doc = config::parse_config(&config)?;
            let dir = config.parent().unwrap_or(std::path::Path::new("."));
            let plan = config::build_plan(&doc, dir)?;
            println!(
                "ok: {} metric, {}x{} grid, t_end = {}, {} c value(s)",
                plan.regime,
                plan.initial.grid().n_lat(),
                plan.initial.grid().n_lon(),
                plan.flow.t_end,
                plan.c_values.len()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { quiet } => {
            let records = validate::run_battery();
            if !quiet {
                print!("{}", report::render_summary(&records));
            }
            let ok = records.iter().all(|r| r.pass);
            Ok(if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn reference_command(regime: &str, c: f64) -> Result<ExitCode> {
    match regime {
        "flat" => {
            let v = omega_c_reference(Regime::Flat, c).map_err(|e| anyhow!("{e}"))?;
            println!("{v:.7}");
        }
        "hyperbolic" => {
            let v = omega_c_reference(Regime::Hyperbolic, c).map_err(|e| anyhow!("{e}"))?;
            let r_star = hyperbolic_max_radius(c).map_err(|e| anyhow!("{e}"))?;
            let ball = hyperbolic_ball(r_star);
            println!(
                "{v:.7}, r* = {r_star:.7}, ball_area = {:.7}, ball_volume = {:.7}",
                ball.area, ball.volume
            );
        }
        other => bail!("regime must be \"flat\" or \"hyperbolic\", got {other:?}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_grid_override(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| anyhow!("--grid expects <lat>x<lon>, got {text:?}"))?;
    Ok((
        a.parse()
            .with_context(|| format!("bad latitude count {a:?}"))?,
        b.parse()
            .with_context(|| format!("bad longitude count {b:?}"))?,
    ))
}

fn run_command(
    config_path: &Path,
    out_override: Option<PathBuf>,
    grid_override: Option<String>,
    quiet: bool,
) -> Result<ExitCode> {
    let doc = config::parse_config(config_path)?;
    let dir = config_path.parent().unwrap_or(std::path::Path::new("."));
    let mut plan = config::build_plan(&doc, dir)?;
    if let Some(dir) = out_override {
        plan.out_dir = dir;
    }
    if let Some(text) = grid_override {
        let (n_lat, n_lon) = parse_grid_override(&text)?;
        if doc.initial.radii_file.is_some() {
            bail!("--grid cannot override a surface loaded from initial.radii_file");
        }
        let radius = doc.initial.radius.expect("validated");
        let grid = SphereGrid::new(n_lat, n_lon).map_err(|e| anyhow!("--grid: {e}"))?;
        plan.initial = RadialSurface::round(doc.initial.center, radius, grid)
            .map_err(|e| anyhow!("--grid: {e}"))?;
    }
    std::fs::create_dir_all(&plan.out_dir)
        .with_context(|| format!("creating {}", plan.out_dir.display()))?;

    let records = execute(&plan)?;
    let json = report::to_json(&records);
    std::fs::write(plan.out_dir.join("report.json"), json)
        .with_context(|| "writing report.json")?;
    if !quiet {
        print!("{}", report::render_summary(&records));
    }
    let ok = records.iter().all(|r| r.pass);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn execute(plan: &RunPlan) -> Result<Vec<CheckRecord>> {
    let mut records = Vec::new();

    // optional pre-smoothing of the initial surface
    let initial = if plan.presmooth_epsilon > 0.0 {
        let steps = if plan.presmooth_steps > 0 {
            plan.presmooth_steps
        } else {
            let geom = geometry(&plan.initial, &plan.field)
                .map_err(|e| anyhow!("initial surface geometry: {e}"))?;
            let stable = 2.0 / (std::f64::consts::PI * std::f64::consts::PI)
                * geom.min_spacing
                * geom.min_spacing
                * geom.margin_min;
            ((plan.presmooth_epsilon / (0.5 * stable)).ceil() as usize).max(8)
        };
        run_mcf_smoothing(&plan.initial, &plan.field, plan.presmooth_epsilon, steps)
            .map_err(|e| anyhow!("pre-smoothing: {e}"))?
    } else {
        plan.initial.clone()
    };

    let trace = run_imcf(initial, &plan.field, &plan.flow);

    csv::emit_csv(&trace, &plan.c_values, &plan.out_dir.join("trace.csv"))?;
    if plan.checkpoint_every > 0.0 {
        let mut next = 0.0;
        let mut index = 0usize;
        for s in &trace.samples {
            if s.t + 1e-12 >= next {
                let path = plan.out_dir.join(format!("checkpoint_{index:04}.surface"));
                starflow_core::io::save_surface(&s.surface, &path)
                    .map_err(|e| anyhow!("checkpoint: {e}"))?;
                index += 1;
                next += plan.checkpoint_every;
            }
        }
    }

    let completed = matches!(trace.status, FlowStatus::Completed);
    let final_t = trace.samples.last().map(|s| s.t).unwrap_or(0.0);
    records.push(CheckRecord::new(
        "run_completed",
        final_t,
        plan.flow.t_end,
        completed,
    ));
    if !completed {
        // diagnostics on partial traces would mislead; report and stop
        return Ok(records);
    }

    let final_volume = trace.samples.last().map(|s| s.row.volume).unwrap_or(0.0);
    if plan.target_volume > 0.0 {
        records.push(CheckRecord::new(
            "target_volume",
            final_volume,
            plan.target_volume,
            final_volume >= plan.target_volume,
        ));
    }

    if plan.geroch {
        let rep = geroch_report(&trace, plan.regime, None).map_err(|e| anyhow!("{e}"))?;
        records.push(CheckRecord::new(
            "geroch_min_increment",
            rep.min_increment,
            -rep.tolerance,
            rep.monotone,
        ));
    }

    if plan.isoperimetric {
        let rep = isoperimetric_report(&trace, plan.regime).map_err(|e| anyhow!("{e}"))?;
        let name = match plan.regime {
            Regime::Flat => "iso_max_excess_flat",
            Regime::Hyperbolic => "iso_max_excess_hyperbolic",
        };
        // the bound itself must not be violated; strictness is informational
        records.push(CheckRecord::new(
            name,
            rep.max_excess,
            rep.tolerance,
            rep.max_excess <= rep.tolerance,
        ));
        records.push(CheckRecord::new(
            "iso_all_strict",
            if rep.all_strict { 1.0 } else { 0.0 },
            0.0,
            true,
        ));
    }

    // Holder chain gap must stay above the roundoff floor at every sample
    let mut holder_min = f64::INFINITY;
    let mut holder_floor = 0.0f64;
    for s in &trace.samples {
        if let Some(gap) = s.row.holder_gap {
            holder_min = holder_min.min(gap);
            holder_floor = holder_floor.max(1e-8 * s.row.area);
        }
    }
    if holder_min.is_finite() {
        records.push(CheckRecord::new(
            "holder_min_gap",
            holder_min,
            -holder_floor,
            holder_min >= -holder_floor,
        ));
    }

    if plan.sweepout {
        for &c in &plan.c_values {
            let rec = sweepout_report(&trace, plan.regime, c, None).map_err(|e| anyhow!("{e}"))?;
            let tag = csv::format_c(c);
            records.push(CheckRecord::new(
                format!("sweepout_sup_ac_c{tag}"),
                rec.sup_ac,
                rec.reference,
                rec.sup_ac <= rec.reference + rec.strict_margin,
            ));
            // the two strictness routes are equivalent only when the trace
            // covers the volume of the reference maximizer
            let v_star = match plan.regime {
                Regime::Flat => 4.0 * std::f64::consts::PI / 3.0 * (2.0 / c).powi(3),
                Regime::Hyperbolic => {
                    hyperbolic_ball(hyperbolic_max_radius(c).map_err(|e| anyhow!("{e}"))?).volume
                }
            };
            let v_first = trace.samples.first().map(|s| s.row.volume).unwrap_or(0.0);
            let covered = v_first <= v_star && v_star <= final_volume;
            records.push(CheckRecord::new(
                format!("sweepout_strict_c{tag}"),
                if rec.strict { 1.0 } else { 0.0 },
                0.0,
                rec.routes_agree() || !covered,
            ));
            if plan.target_volume > 0.0 {
                let final_ac = *rec.ac.last().expect("samples");
                records.push(CheckRecord::new(
                    format!("sweepout_mountain_pass_c{tag}"),
                    final_ac,
                    0.0,
                    rec.mountain_pass_valid,
                ));
            }
        }
    }

    if plan.evolution {
        let res = evolution_consistency(&trace, &plan.field).map_err(|e| anyhow!("{e}"))?;
        records.push(CheckRecord::new(
            "evolution_area_law",
            res.area_law,
            plan.evolution_tolerance,
            res.area_law <= plan.evolution_tolerance,
        ));
        records.push(CheckRecord::new(
            "evolution_metric_law",
            res.metric_law,
            plan.evolution_tolerance,
            res.metric_law <= plan.evolution_tolerance,
        ));
    }

    if plan.floor_fit {
        let fit = mean_curvature_floor_fit(&trace);
        records.push(CheckRecord::new(
            "mean_curvature_floor_c",
            fit.c_fit,
            0.0,
            fit.c_fit > 0.0,
        ));
    }

    Ok(records)
}
