//! Time-series CSV emission.
//!
//! Header: `t,area,volume,m_h,m_h_star,iso_ratio,star_margin,h_min,h_max,
//! bnorm_sqrtA,ac_<c>...`, one row per sample, full double precision
//! (shortest round-trip formatting), newline-terminated rows.

use std::io::Write;

use anyhow::{Context, Result};
use starflow_core::flow::FlowTrace;

pub fn format_c(c: f64) -> String {
    format!("{c}")
}

pub fn csv_string(trace: &FlowTrace<f64>, c_values: &[f64]) -> String {
    let mut out =
        String::from("t,area,volume,m_h,m_h_star,iso_ratio,star_margin,h_min,h_max,bnorm_sqrtA");
    for &c in c_values {
        out.push_str(&format!(",ac_{}", format_c(c)));
    }
    out.push('\n');
    for s in &trace.samples {
        let r = &s.row;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.t,
            r.area,
            r.volume,
            r.m_h,
            r.m_h_star,
            r.iso_ratio,
            r.star_margin,
            r.h_min,
            r.h_max,
            r.b_norm_sqrt_a
        ));
        for &c in c_values {
            out.push_str(&format!(",{}", r.ac(c)));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(trace: &FlowTrace<f64>, c_values: &[f64], path: &std::path::Path) -> Result<()> {
    let mut file =
        std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    file.write_all(csv_string(trace, c_values).as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
