//! Deterministic CSV and JSON emission.
//!
//! All floating-point fields are printed with 12 significant digits in
//! scientific notation, so identical runs produce byte-identical files
//! regardless of thread count.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use helichain::{SweepResult, SweepSurface};

/// 12 significant digits, scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

pub struct CsvWriter {
    buffer: String,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = header.join(",");
        buffer.push('\n');
        CsvWriter { buffer }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
        let mut file =
            fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        file.write_all(self.buffer.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn argmax_json(r: &SweepResult) -> Value {
    json!({
        "time": r.argmax.time,
        "tau": r.argmax.tau,
        "e1": r.argmax.e1,
        "kicks": r.argmax.kicks,
    })
}

/// JSON summary of a sweep: global maxima, per-E1 reductions, and the
/// gains over the unkicked baseline.
pub fn surface_summary_json(surface: &SweepSurface, e1_values: &[f64]) -> Value {
    // per-E1 f_maxx: best over tau (points are in tau-major order)
    let n_e1 = e1_values.len();
    let mut by_e1: Vec<Value> = Vec::with_capacity(n_e1);
    for (ei, &e1) in e1_values.iter().enumerate() {
        let best = surface
            .points
            .iter()
            .skip(ei)
            .step_by(n_e1)
            .fold(f64::NEG_INFINITY, |acc, p| acc.max(p.f_max));
        by_e1.push(json!({
            "e1": e1,
            "f_maxx": best,
            "delta_f_maxx": best - surface.unkicked.f_max,
        }));
    }
    json!({
        "f_maxx": surface.summary.f_maxx,
        "f_maxxx": surface.summary.f_maxxx,
        "fidelity_maxxx": (2.0 * surface.summary.f_maxxx + 1.0) / 3.0,
        "argmax": argmax_json(&surface.summary),
        "unkicked": {
            "f_max": surface.unkicked.f_max,
            "argmax_time": surface.unkicked.argmax.time,
        },
        "delta_f_maxxx": surface.summary.f_maxxx - surface.unkicked.f_max,
        "f_maxx_by_e1": by_e1,
    })
}
