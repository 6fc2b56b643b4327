//! Column-wise affine normalisation shared by the GAN trainers and the SVM.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape, Result};
use crate::matrix::Matrix;

/// How a scaler pools statistics across columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    /// One shared mean and deviation over every feature value.
    #[default]
    Global,
    /// Per-column z-score.
    PerFeature,
    /// One shared affine map taking the smallest value to 0 and the largest
    /// to 1.
    MinMax,
}

/// Affine map `(x - mean) / scale` applied column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

const MIN_SCALE: f64 = 1e-12;

impl FeatureScaler {
    pub fn identity(dim: usize) -> Self {
        Self { mean: vec![0.0; dim], scale: vec![1.0; dim] }
    }

    pub fn fit(data: &Matrix, mode: Scaling) -> Result<Self> {
        if data.is_empty() {
            return Err(invalid("cannot fit a scaler on no rows"));
        }
        let (n, d) = (data.rows() as f64, data.cols());
        let scaler = match mode {
            Scaling::Global => {
                let all = data.as_slice();
                let m = all.iter().sum::<f64>() / all.len() as f64;
                let var = all.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / all.len() as f64;
                Self { mean: vec![m; d], scale: vec![var.sqrt().max(MIN_SCALE); d] }
            }
            Scaling::MinMax => {
                let all = data.as_slice();
                let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                Self { mean: vec![lo; d], scale: vec![(hi - lo).max(MIN_SCALE); d] }
            }
            Scaling::PerFeature => {
                let mut mean = vec![0.0; d];
                for r in data.iter_rows() {
                    mean.iter_mut().zip(r).for_each(|(m, v)| *m += v / n);
                }
                let mut var = vec![0.0; d];
                for r in data.iter_rows() {
                    var.iter_mut().zip(r.iter().zip(&mean)).for_each(|(s, (v, m))| *s += (v - m) * (v - m) / n);
                }
                Self { mean, scale: var.into_iter().map(|v| v.sqrt().max(MIN_SCALE)).collect() }
            }
        };
        Ok(scaler)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn check(&self, data: &Matrix) -> Result<()> {
        if data.cols() != self.dim() {
            return Err(shape(format!("scaler expects {} columns, got {}", self.dim(), data.cols())));
        }
        Ok(())
    }

    pub fn transform(&self, data: &Matrix) -> Result<Matrix> {
        self.check(data)?;
        let mut out = data.clone();
        for r in 0..out.rows() {
            for ((v, m), s) in out.row_mut(r).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = (*v - m) / s;
            }
        }
        Ok(out)
    }

    pub fn inverse(&self, data: &Matrix) -> Result<Matrix> {
        self.check(data)?;
        let mut out = data.clone();
        for r in 0..out.rows() {
            for ((v, m), s) in out.row_mut(r).iter_mut().zip(&self.mean).zip(&self.scale) {
                *v = *v * s + m;
            }
        }
        Ok(out)
    }
}
