//! CSV tables of experiment records.

use std::io::Write;

use crate::error::Result;
use crate::experiment::{sort_records, ExperimentRecord};

pub const CSV_HEADER: [&str; 10] = [
    "algo", "n", "B", "eps", "ops_total", "iterations", "residual", "cost", "seed", "wall_ms",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the header and one row per record, sorted by
/// `(algo, n, B, eps, seed)`.
pub fn write_csv<W: Write>(records: &[ExperimentRecord], out: W) -> Result<()> {
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        w.write_record([
            r.algo.name().to_string(),
            r.n.to_string(),
            r.batch.to_string(),
            format_float(r.eps),
            r.ops_total.to_string(),
            r.iterations.to_string(),
            format_float(r.residual),
            format_float(r.cost),
            r.seed.to_string(),
            format_float(r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}
