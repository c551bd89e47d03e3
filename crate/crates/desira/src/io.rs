//! Small CSV and number-formatting helpers shared by the exporters.
//!
//! CSV output uses 17 significant digits so that every value round-trips
//! through `f64` parsing exactly; human-readable summaries use 6.

use std::io::{self, Write};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Format a float with 17 significant digits (machine round-trip).
pub fn fmt_full(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Format a float with 6 significant digits for human-readable summaries.
pub fn fmt_short(v: f64) -> String {
    format!("{v:.6}")
}

/// Write one CSV row of full-precision floats.
pub fn write_row(w: &mut impl Write, values: &[f64]) -> io::Result<()> {
    let cells: Vec<String> = values.iter().map(|&v| fmt_full(v)).collect();
    writeln!(w, "{}", cells.join(","))
}

/// Write a headerless CSV matrix, one row per line.
pub fn write_matrix(w: &mut impl Write, m: &Array2<f64>) -> io::Result<()> {
    for row in m.rows() {
        write_row(w, row.as_slice().expect("row-major layout"))?;
    }
    Ok(())
}

/// Parse a headerless CSV document into a matrix. Every row must have the
/// same number of comma-separated numeric cells; blank lines are skipped.
pub fn parse_matrix(text: &str) -> Result<Array2<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = parse_float_row(line)
            .map_err(|e| Error::invalid(format!("csv line {}: {e}", idx + 1)))?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::shape(format!(
                    "csv line {}: expected {} columns, found {}",
                    idx + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::invalid("csv document contains no data rows"));
    }
    let ncols = rows[0].len();
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((rows.len(), ncols), flat).map_err(|e| Error::shape(e.to_string()))
}

/// Parse one comma-separated row of floats.
pub fn parse_float_row(line: &str) -> std::result::Result<Vec<f64>, String> {
    line.split(',')
        .map(|cell| {
            cell.trim()
                .parse::<f64>()
                .map_err(|_| format!("`{}` is not a number", cell.trim()))
        })
        .collect()
}
