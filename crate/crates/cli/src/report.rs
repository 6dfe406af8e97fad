//! Machine-readable check records and the human-readable summary.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl CheckRecord {
    pub fn new(name: impl Into<String>, value: f64, threshold: f64, pass: bool) -> Self {
        CheckRecord {
            name: name.into(),
            value,
            threshold,
            pass,
        }
    }
}

pub fn render_summary(records: &[CheckRecord]) -> String {
    let mut out = String::new();
    let width = records
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(0)
        .max(5);
    for r in records {
        out.push_str(&format!(
            "{:<width$}  value = {:>14.6e}  threshold = {:>14.6e}  {}\n",
            r.name,
            r.value,
            r.threshold,
            if r.pass { "pass" } else { "FAIL" },
            width = width
        ));
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    out.push_str(&format!("{} checks, {} failed\n", records.len(), failed));
    out
}

pub fn to_json(records: &[CheckRecord]) -> String {
    serde_json::to_string_pretty(records).expect("check records serialize")
}
