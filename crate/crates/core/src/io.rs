//! JSON file formats for models and sensor realizations.
//!
//! Matrices are arrays of rows. A model file looks like
//!
//! ```json
//! {"p": 2, "A": [[6, 0], [0, 1]], "sigma_w": [[1, 0], [0, 1]], "sigma_x0": [[1, 0], [0, 1]]}
//! ```
//!
//! A realization file carries, per step, the measurement map `E`, the noise
//! covariance `sigma_z` (both empty when the step has no measurement) and the
//! posterior covariance `P` the sensor was built for.

use serde::{Deserialize, Serialize};

use crate::error::{mismatch, Error, Result};
use crate::linalg::Mat;
use crate::model::GaussMarkovModel;
use crate::realization::{SensorRealization, SensorStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub p: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub sigma_w: Vec<Vec<f64>>,
    pub sigma_x0: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationStepFile {
    #[serde(rename = "E")]
    pub e: Vec<Vec<f64>>,
    pub sigma_z: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFile {
    pub stationary: bool,
    pub steps: Vec<RealizationStepFile>,
}

pub fn matrix_to_rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|r| m.row(r).iter().copied().collect()).collect()
}

/// Builds an `rows × cols` matrix; an empty array is accepted when `rows = 0`.
pub fn matrix_from_rows(rows: &[Vec<f64>], what: &str, nrows: usize, ncols: usize) -> Result<Mat<f64>> {
    if rows.len() != nrows {
        return Err(mismatch(&format!("{what} rows"), nrows, rows.len()));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(mismatch(&format!("{what} row {i} length"), ncols, r.len()));
        }
    }
    Ok(Mat::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

impl ModelFile {
    pub fn from_model(model: &GaussMarkovModel<f64>) -> Self {
        Self {
            p: model.dim(),
            a: matrix_to_rows(model.a()),
            sigma_w: matrix_to_rows(model.sigma_w()),
            sigma_x0: matrix_to_rows(model.sigma_x0()),
        }
    }

    pub fn into_model(self) -> Result<GaussMarkovModel<f64>> {
        let p = self.p;
        GaussMarkovModel::new(
            p,
            matrix_from_rows(&self.a, "A", p, p)?,
            matrix_from_rows(&self.sigma_w, "sigma_w", p, p)?,
            matrix_from_rows(&self.sigma_x0, "sigma_x0", p, p)?,
        )
    }
}

pub fn model_from_json(text: &str) -> Result<GaussMarkovModel<f64>> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| Error::Serialization(format!("model file: {e}")))?;
    file.into_model()
}

pub fn model_to_json(model: &GaussMarkovModel<f64>) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model)).expect("plain data serializes")
}

/// Serializes a realization together with the posterior covariances it was
/// built for (one per step).
pub fn realization_to_json(realization: &SensorRealization<f64>, p_seq: &[Mat<f64>]) -> Result<String> {
    if realization.steps.len() != p_seq.len() {
        return Err(mismatch("covariances per realization step", realization.steps.len(), p_seq.len()));
    }
    let file = RealizationFile {
        stationary: realization.stationary,
        steps: realization
            .steps
            .iter()
            .zip(p_seq)
            .map(|(s, p)| RealizationStepFile {
                e: matrix_to_rows(&s.e),
                sigma_z: matrix_to_rows(&s.sigma_z),
                p: matrix_to_rows(p),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Serialization(e.to_string()))
}

/// Parses a realization for a model of dimension `p`.
pub fn realization_from_json(text: &str, p: usize) -> Result<(SensorRealization<f64>, Vec<Mat<f64>>)> {
    let file: RealizationFile =
        serde_json::from_str(text).map_err(|e| Error::Serialization(format!("realization file: {e}")))?;
    let mut steps = Vec::with_capacity(file.steps.len());
    let mut p_seq = Vec::with_capacity(file.steps.len());
    for (t, s) in file.steps.iter().enumerate() {
        let m = s.e.len();
        steps.push(SensorStep {
            e: matrix_from_rows(&s.e, &format!("E[{t}]"), m, p)?,
            sigma_z: matrix_from_rows(&s.sigma_z, &format!("sigma_z[{t}]"), m, m)?,
        });
        p_seq.push(matrix_from_rows(&s.p, &format!("P[{t}]"), p, p)?);
    }
    let realization = SensorRealization {
        steps,
        stationary: file.stationary,
    };
    realization.check(p)?;
    Ok((realization, p_seq))
}
