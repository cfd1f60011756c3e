//! Deterministic CSV and JSON writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> CliResult<()>
where
    I: IntoIterator<Item = String>,
{
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let go = || -> std::io::Result<()> {
        w.write_all(header.as_bytes())?;
        w.write_all(b"\n")?;
        for row in rows {
            w.write_all(row.as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    go().map_err(|e| io_err(path, e))
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = to_json(value)?;
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}
