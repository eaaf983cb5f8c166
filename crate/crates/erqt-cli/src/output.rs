//! Deterministic CSV emission.
//!
//! Floats are serialized with 17 significant digits, enough to round-trip
//! every `f64` bit-exactly, so two runs of the same scenario differ at most
//! in the `wall_time_s` column.

use std::io::Write;
use std::path::Path;

use crate::runner::ResultRow;

/// The exact header line.
pub const CSV_HEADER: &str =
    "scenario,param_name,param_value,method,current,abs_error,n_eval,wall_time_s,diagnostics";

/// Serialize a float with 17 significant digits (round-trip exact).
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else {
        format!("{x:.16e}")
    }
}

/// Strip characters that would break the single-line comma-separated layout;
/// diagnostics sometimes carry full error messages.
fn sanitize(field: &str) -> String {
    field.replace(['\n', '\r', ','], " ")
}

/// Write the rows as CSV. The file always ends with a newline; an empty row
/// list produces a header-only file.
pub fn write_csv<W: Write>(mut writer: W, rows: &[ResultRow]) -> std::io::Result<()> {
    writeln!(writer, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(
            writer,
            "{},{},{},{},{},{},{},{},{}",
            row.scenario,
            row.param_name,
            row.param_value.map(format_float).unwrap_or_default(),
            row.method,
            format_float(row.current),
            format_float(row.abs_error),
            row.n_eval,
            format_float(row.wall_time_s),
            sanitize(&row.diagnostics.join(";")),
        )?;
    }
    Ok(())
}

/// Write the rows to a file at `path`.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<(), String> {
    let file = std::fs::File::create(path)
        .map_err(|e| format!("cannot create {}: {e}", path.display()))?;
    let mut writer = std::io::BufWriter::new(file);
    write_csv(&mut writer, rows).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    writer
        .into_inner()
        .map_err(|e| format!("cannot flush {}: {e}", path.display()))?;
    Ok(())
}
