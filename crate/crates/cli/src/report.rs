//! Machine-readable outputs: the fixed-schema CSV and JSON reports that
//! carry the numeric policy and seed for reproducibility.

use hyperdpp_core::bounds::{BoundReport, VarianceReport};
use hyperdpp_core::NumericPolicy;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: &str =
    "R,expectation,variance_lunule,variance_direct,variance_empirical,stderr,ratio,C,pass";

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV row; floats in shortest round-trip decimal, absent fields empty.
pub fn csv_row(r: &VarianceReport, with_bound: bool) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.radius,
        r.expectation,
        r.variance_lunule,
        r.variance_direct,
        fmt_opt(r.variance_empirical),
        fmt_opt(r.stderr),
        r.ratio,
        if with_bound {
            r.bound_constant.to_string()
        } else {
            String::new()
        },
        if with_bound {
            r.pass.to_string()
        } else {
            String::new()
        },
    )
}

pub fn write_variance_csv(
    path: &Path,
    reports: &[VarianceReport],
    with_bound: bool,
) -> std::io::Result<()> {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r, with_bound));
        out.push('\n');
    }
    atomic_write(path, out.as_bytes())
}

/// Envelope for JSON reports: payload plus the reproducibility context.
#[derive(Serialize)]
pub struct Envelope<T: Serialize> {
    pub seed: u64,
    pub numeric_policy: NumericPolicy,
    #[serde(flatten)]
    pub payload: T,
}

pub fn write_json<T: Serialize>(path: &Path, envelope: &Envelope<T>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(envelope)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

#[derive(Serialize)]
pub struct BoundSummary<'a> {
    pub kernel: &'a str,
    pub report: &'a BoundReport,
}

fn atomic_write(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}
