//! Deterministic output: every float is rendered with a fixed-precision
//! scientific format and stored as a JSON string, and JSON maps serialize
//! with sorted keys, so identical runs produce byte-identical files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::heat::{HeatSample, SpectralFit};
use crate::LabError;

/// Fixed-precision rendering used by every report.
pub fn fmt_float(x: f64) -> String {
    format!("{:.12e}", x)
}

/// A float as a JSON string in the fixed rendering.
pub fn float_value(x: f64) -> Value {
    Value::String(fmt_float(x))
}

/// Pretty-printed JSON with a trailing newline.
pub fn json_to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON serialization cannot fail");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, v: &Value) -> Result<(), LabError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(json_to_string(v).as_bytes())?;
    Ok(())
}

/// Comma-separated table with a header line.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<(), LabError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "{}", header)?;
    for row in rows {
        writeln!(f, "{}", row.join(","))?;
    }
    Ok(())
}

/// The spectral-fit report object with its fixed field set.
pub fn fit_json(fit: &SpectralFit, dim_ker: usize) -> Value {
    json!({
        "c_minus1": float_value(fit.c_minus1),
        "c0": float_value(fit.c0),
        "c1": float_value(fit.c1),
        "residual": float_value(fit.residual),
        "window": [float_value(fit.window.0), float_value(fit.window.1)],
        "dim_ker": dim_ker,
    })
}

/// Rows of the spectrum table: one `(index, eigenvalue)` pair per line.
pub fn spectrum_rows(spectrum: &[f64]) -> Vec<Vec<String>> {
    spectrum
        .iter()
        .enumerate()
        .map(|(i, &x)| vec![i.to_string(), fmt_float(x)])
        .collect()
}

/// Rows of the heat-sample table: one `(t, value)` pair per line.
pub fn heat_rows(samples: &[HeatSample]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|s| vec![fmt_float(s.t), fmt_float(s.value)])
        .collect()
}

/// Rows of the fitted model `c₋₁/t + c₀ + c₁t` over the sample times, for
/// plotting against the measured trace.
pub fn overlay_rows(fit: &SpectralFit, samples: &[HeatSample]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|s| {
            let model = fit.c_minus1 / s.t + fit.c0 + fit.c1 * s.t;
            vec![fmt_float(s.t), fmt_float(model)]
        })
        .collect()
}

/// Output sink: prints to stdout and, when a directory is set, also writes
/// files into it.
pub struct Sink {
    pub dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>) -> Sink {
        Sink { dir }
    }

    /// Writes a JSON file when a directory is set; always returns the text.
    pub fn emit_json(&self, name: &str, v: &Value) -> Result<String, LabError> {
        let text = json_to_string(v);
        if let Some(dir) = &self.dir {
            write_json(&dir.join(name), v)?;
        }
        Ok(text)
    }

    /// Writes a CSV file when a directory is set.
    pub fn emit_csv(
        &self,
        name: &str,
        header: &str,
        rows: &[Vec<String>],
    ) -> Result<(), LabError> {
        if let Some(dir) = &self.dir {
            write_csv(&dir.join(name), header, rows)?;
        }
        Ok(())
    }
}
