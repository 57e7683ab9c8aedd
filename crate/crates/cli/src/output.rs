//! Deterministic file output and field-file ingestion. Floats are written
//! with Rust's shortest round-trip formatting so reruns are byte-identical
//! and re-parsing reproduces the in-memory values exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;

use egh_spdc::SampledField;

use crate::CliError;

pub fn ensure_out_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))
}

pub fn csv_writer(path: &PathBuf, header: &str) -> Result<BufWriter<File>, CliError> {
    let file = File::create(path)
        .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}").map_err(|e| CliError::Config(format!("write failed: {e}")))?;
    Ok(w)
}

pub fn write_row(w: &mut BufWriter<File>, fields: &[f64]) -> Result<(), CliError> {
    let mut line = String::new();
    for (i, v) in fields.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        // Scientific notation keeps tiny amplitudes readable; Rust prints
        // the shortest mantissa that parses back to the same f64.
        line.push_str(&format!("{v:e}"));
    }
    writeln!(w, "{line}").map_err(|e| CliError::Config(format!("write failed: {e}")))
}

pub fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

/// Reads a sampled transverse field from CSV with header `x_m,y_m,re,im`.
/// Rows must enumerate a full uniform grid with x as the outer loop.
pub fn read_field_csv(path: &Path) -> Result<SampledField, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "x_m,y_m,re,im" => {}
        other => {
            return Err(CliError::Config(format!(
                "{}: expected header x_m,y_m,re,im, got {:?}",
                path.display(),
                other
            )))
        }
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut values: Vec<C64> = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(CliError::Config(format!(
                "{}:{}: expected 4 columns",
                path.display(),
                lineno + 2
            )));
        }
        let parse = |s: &str| -> Result<f64, CliError> {
            s.trim().parse().map_err(|e| {
                CliError::Config(format!("{}:{}: {e}", path.display(), lineno + 2))
            })
        };
        let (x, y, re, im) = (parse(cols[0])?, parse(cols[1])?, parse(cols[2])?, parse(cols[3])?);
        if xs.last() != Some(&x) {
            xs.push(x);
        }
        if xs.len() == 1 {
            ys.push(y);
        }
        values.push(C64::new(re, im));
    }
    if xs.is_empty() || ys.is_empty() {
        return Err(CliError::Config(format!("{}: no data rows", path.display())));
    }
    SampledField::new(xs, ys, values)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
