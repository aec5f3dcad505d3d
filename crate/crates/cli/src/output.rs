use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::commands::Failure;

pub const LN_2: f64 = std::f64::consts::LN_2;

pub fn bits(nats: f64) -> f64 {
    nats / LN_2
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRecord {
    #[serde(rename = "D")]
    pub distortion: f64,
    pub rate_nats: f64,
    pub rate_bits: f64,
    pub method: String,
    pub valid: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiniteRow {
    pub t: usize,
    #[serde(rename = "trace_P")]
    pub trace_p: f64,
    pub step_rate_nats: f64,
    pub step_rate_bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationRow {
    pub t: usize,
    pub empirical_mse: f64,
    pub stderr: f64,
    pub theoretical_mse: f64,
}

pub fn csv<S: Serialize>(rows: &[S]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::Io(e.to_string()))
}

pub fn json<S: Serialize + ?Sized>(value: &S) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `text` to `out`, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Io(e.to_string()))
        }
    }
}

/// `"<value> nats"` or `"<value> bits"`.
pub fn rate_label(nats: f64, in_bits: bool) -> String {
    if in_bits {
        format!("{:.6} bits", bits(nats))
    } else {
        format!("{nats:.6} nats")
    }
}
