//! PCA compression followed by per-feature min-max scaling onto [−π, π].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_matrix(x: &[Vec<f64>]) -> Result<usize> {
    let d = x.first().map(Vec::len).unwrap_or(0);
    if d == 0 {
        return Err(Error::Shape("input matrix is empty".into()));
    }
    if let Some(row) = x.iter().position(|r| r.len() != d) {
        return Err(Error::Shape(format!("row {row} has {} values, expected {d}", x[row].len())));
    }
    Ok(d)
}

fn column_means(x: &[Vec<f64>], d: usize) -> Vec<f64> {
    let mut mean = vec![0.0; d];
    for row in x {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    let n = x.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// `k` orthonormal rows of length `d`.
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "PCA expects {} features, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        Ok(self
            .components
            .iter()
            .map(|c| c.iter().zip(x.iter().zip(&self.mean)).map(|(w, (v, m))| w * (v - m)).sum())
            .collect())
    }
}

/// Top-`k` principal axes from the SVD of the centered data.
///
/// Each component is signed so its largest-magnitude entry (first on ties)
/// is positive. Variances use the `1/(M−1)` sample normalization.
pub fn pca_fit(x: &[Vec<f64>], k: usize) -> Result<PcaModel> {
    let d = check_matrix(x)?;
    let m = x.len();
    if m < 2 {
        return Err(Error::Argument(format!("PCA needs at least 2 samples, got {m}")));
    }
    if k < 1 || k > d.min(m) {
        return Err(Error::Argument(format!(
            "PCA output dimension {k} not in 1..={}",
            d.min(m)
        )));
    }
    let mean = column_means(x, d);
    let centered = DMatrix::from_fn(m, d, |i, j| x[i][j] - mean[j]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let singular = svd.singular_values;

    let mut order: Vec<usize> = (0..singular.len()).collect();
    order.sort_by(|&a, &b| singular[b].total_cmp(&singular[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let mut row: Vec<f64> = v_t.row(idx).iter().copied().collect();
        let pivot = row
            .iter()
            .enumerate()
            .fold(0, |best, (i, v)| if v.abs() > row[best].abs() { i } else { best });
        if row[pivot] < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(row);
        explained_variance.push(singular[idx] * singular[idx] / (m as f64 - 1.0));
    }
    Ok(PcaModel {
        mean,
        components,
        explained_variance,
    })
}

pub fn pca_transform(model: &PcaModel, x: &[f64]) -> Result<Vec<f64>> {
    model.transform(x)
}

/// Per-feature min-max map onto [−π, π]. Values outside the fit range
/// extrapolate linearly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalerModel {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalerModel {
    pub fn dim(&self) -> usize {
        self.min.len()
    }

    pub fn transform(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::Shape(format!(
                "scaler expects {} features, got {}",
                self.dim(),
                x.len()
            )));
        }
        Ok(x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| {
                if hi > lo {
                    -PI + 2.0 * PI * ((v - lo) / (hi - lo))
                } else {
                    0.0
                }
            })
            .collect())
    }
}

pub fn scaler_fit(x: &[Vec<f64>]) -> Result<ScalerModel> {
    let d = check_matrix(x)?;
    let mut min = vec![f64::INFINITY; d];
    let mut max = vec![f64::NEG_INFINITY; d];
    for row in x {
        for j in 0..d {
            min[j] = min[j].min(row[j]);
            max[j] = max[j].max(row[j]);
        }
    }
    Ok(ScalerModel { min, max })
}

pub fn scaler_transform(model: &ScalerModel, x: &[f64]) -> Result<Vec<f64>> {
    model.transform(x)
}

/// Optional z-scoring applied before PCA.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &[Vec<f64>]) -> Result<Self> {
        let d = check_matrix(x)?;
        let mean = column_means(x, d);
        let denom = (x.len() as f64 - 1.0).max(1.0);
        let scale = (0..d)
            .map(|j| {
                let var = x.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / denom;
                if var > 0.0 {
                    var.sqrt()
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Self { mean, scale })
    }

    fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessModel {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardize: Option<Standardizer>,
    pub pca: PcaModel,
    pub scaler: ScalerModel,
}

impl PreprocessModel {
    pub fn input_dim(&self) -> usize {
        self.pca.input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.scaler.dim()
    }

    /// Raw features to encoding angles.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_dim() {
            return Err(Error::Shape(format!(
                "preprocessing expects {} features, got {}",
                self.input_dim(),
                x.len()
            )));
        }
        let x = match &self.standardize {
            Some(s) => s.transform(x),
            None => x.to_vec(),
        };
        self.scaler.transform(&self.pca.transform(&x)?)
    }
}

/// Fits PCA, then the scaler on the PCA-projected training rows. Only the
/// rows passed here are read.
pub fn preprocess_fit(x_train: &[Vec<f64>], k: usize, standardize: bool) -> Result<PreprocessModel> {
    check_matrix(x_train)?;
    let standardizer = if standardize {
        Some(Standardizer::fit(x_train)?)
    } else {
        None
    };
    let prepared: Vec<Vec<f64>> = match &standardizer {
        Some(s) => x_train.iter().map(|r| s.transform(r)).collect(),
        None => x_train.to_vec(),
    };
    let pca = pca_fit(&prepared, k)?;
    let projected = prepared
        .iter()
        .map(|r| pca.transform(r))
        .collect::<Result<Vec<_>>>()?;
    let scaler = scaler_fit(&projected)?;
    Ok(PreprocessModel {
        standardize: standardizer,
        pca,
        scaler,
    })
}

pub fn preprocess_apply(model: &PreprocessModel, x: &[f64]) -> Result<Vec<f64>> {
    model.apply(x)
}
