use rand::Rng;
use serde::{Deserialize, Serialize};

use super::check_training_set;
use crate::error::{invalid, shape, Result};
use crate::matrix::Matrix;
use crate::rng::rng_from_seed;
use crate::scaler::{FeatureScaler, Scaling};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    pub c: f64,
    /// `None` means `1 / (d * var)` over the standardized training features.
    pub gamma: Option<f64>,
    /// KKT violation tolerance.
    pub tol: f64,
    pub max_passes: usize,
    /// Standardize features on the training set before fitting.
    pub standardize: bool,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self { c: 1.0, gamma: None, tol: 1e-3, max_passes: 200, standardize: true }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(invalid("SVM C must be positive"));
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(invalid("SVM gamma must be positive"));
            }
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.max_passes == 0 {
            return Err(invalid("SVM tol and max_passes must be positive"));
        }
        Ok(())
    }
}

/// Kernel expansion `f(x) = sum_i coef_i K(sv_i, x) + b` with
/// `coef_i = alpha_i y_i`. Support vectors live in standardized space.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmRbfModel {
    pub support_vectors: Matrix,
    pub dual_coef: Vec<f64>,
    pub bias: f64,
    pub gamma: f64,
    pub c: f64,
    pub scaler: FeatureScaler,
}

/// Solver state exposed for verification.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmTrainReport {
    /// One dual variable per training row.
    pub alphas: Vec<f64>,
    /// Decision value at each training row as tracked by the solver.
    pub cached_decision: Vec<f64>,
    /// Training-row index of each stored support vector.
    pub support_index: Vec<usize>,
    pub passes: usize,
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

impl SvmRbfModel {
    pub fn n_features(&self) -> usize {
        self.scaler.dim()
    }

    /// Decision value for an already standardized row.
    pub fn decision_standardized(&self, z: &[f64]) -> f64 {
        self.support_vectors
            .iter_rows()
            .zip(&self.dual_coef)
            .map(|(sv, c)| c * rbf(sv, z, self.gamma))
            .sum::<f64>()
            + self.bias
    }

    pub fn decision_function(&self, features: &Matrix) -> Result<Vec<f64>> {
        if features.is_empty() {
            return Ok(Vec::new());
        }
        if features.cols() != self.n_features() {
            return Err(shape(format!("SVM trained on {} features, got {}", self.n_features(), features.cols())));
        }
        let z = self.scaler.transform(features)?;
        Ok(z.iter_rows().map(|r| self.decision_standardized(r)).collect())
    }

    /// Positive decision values map to label 1; zero maps to 0.
    pub fn predict(&self, features: &Matrix) -> Result<Vec<u8>> {
        Ok(self.decision_function(features)?.into_iter().map(|f| u8::from(f > 0.0)).collect())
    }
}

pub fn train_svm_rbf(features: &Matrix, labels: &[u8], params: &SvmParams, seed: u64) -> Result<SvmRbfModel> {
    train_svm_rbf_detailed(features, labels, params, seed).map(|(m, _)| m)
}

struct Smo<'a> {
    k: &'a [f64],
    n: usize,
    y: Vec<f64>,
    c: f64,
    alpha: Vec<f64>,
    /// `sum_j alpha_j y_j K(j, i)`, without the bias.
    g: Vec<f64>,
    b: f64,
}

const ALPHA_EPS: f64 = 1e-12;

impl Smo<'_> {
    fn kern(&self, i: usize, j: usize) -> f64 {
        self.k[i * self.n + j]
    }

    fn err(&self, i: usize) -> f64 {
        self.g[i] + self.b - self.y[i]
    }

    fn violates(&self, i: usize, tol: f64) -> bool {
        let r = self.y[i] * self.err(i);
        (r < -tol && self.alpha[i] < self.c) || (r > tol && self.alpha[i] > 0.0)
    }

    fn snap(&self, a: f64) -> f64 {
        if a < ALPHA_EPS {
            0.0
        } else if a > self.c - ALPHA_EPS {
            self.c
        } else {
            a
        }
    }

    fn take_step(&mut self, i: usize, j: usize) -> bool {
        let (yi, yj) = (self.y[i], self.y[j]);
        let (ai, aj) = (self.alpha[i], self.alpha[j]);
        let (ei, ej) = (self.err(i), self.err(j));
        let (lo, hi) = if yi != yj {
            ((aj - ai).max(0.0), (self.c + aj - ai).min(self.c))
        } else {
            ((ai + aj - self.c).max(0.0), (ai + aj).min(self.c))
        };
        if hi - lo < ALPHA_EPS {
            return false;
        }
        let (kii, kjj, kij) = (self.kern(i, i), self.kern(j, j), self.kern(i, j));
        let eta = 2.0 * kij - kii - kjj;
        if eta >= -1e-12 {
            return false;
        }
        let aj_new = self.snap((aj - yj * (ei - ej) / eta).clamp(lo, hi));
        if (aj_new - aj).abs() < 1e-10 * (aj + aj_new + 1e-10) {
            return false;
        }
        let ai_new = self.snap(ai + yi * yj * (aj - aj_new));
        let (dai, daj) = (ai_new - ai, aj_new - aj);
        let b1 = self.b - ei - yi * dai * kii - yj * daj * kij;
        let b2 = self.b - ej - yi * dai * kij - yj * daj * kjj;
        self.b = if ai_new > 0.0 && ai_new < self.c {
            b1
        } else if aj_new > 0.0 && aj_new < self.c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        self.alpha[i] = ai_new;
        self.alpha[j] = aj_new;
        let n = self.n;
        let (ri, rj) = (&self.k[i * n..(i + 1) * n], &self.k[j * n..(j + 1) * n]);
        for ((g, ki), kj) in self.g.iter_mut().zip(ri).zip(rj) {
            *g += yi * dai * ki + yj * daj * kj;
        }
        true
    }
}

/// Simplified SMO: every KKT violator is paired with a random partner,
/// falling back to a scan over all partners from a random offset when the
/// random pair makes no progress. Stops after a pass with no updates or
/// after `max_passes` passes.
pub fn train_svm_rbf_detailed(
    features: &Matrix,
    labels: &[u8],
    params: &SvmParams,
    seed: u64,
) -> Result<(SvmRbfModel, SvmTrainReport)> {
    check_training_set(features, labels)?;
    params.validate()?;
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(invalid("SVM training needs both classes"));
    }
    let scaler = if params.standardize {
        FeatureScaler::fit(features, Scaling::PerFeature)?
    } else {
        FeatureScaler::identity(features.cols())
    };
    let z = scaler.transform(features)?;
    let gamma = match params.gamma {
        Some(g) => g,
        None => {
            let all = z.as_slice();
            let m = all.iter().sum::<f64>() / all.len() as f64;
            let var = all.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / all.len() as f64;
            if var > 0.0 {
                1.0 / (z.cols() as f64 * var)
            } else {
                1.0
            }
        }
    };

    let n = z.rows();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        k[i * n + i] = 1.0;
        for j in 0..i {
            let v = rbf(z.row(i), z.row(j), gamma);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let mut smo = Smo {
        k: &k,
        n,
        y: labels.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect(),
        c: params.c,
        alpha: vec![0.0; n],
        g: vec![0.0; n],
        b: 0.0,
    };
    let mut rng = rng_from_seed(seed);
    let mut passes = 0;
    while passes < params.max_passes {
        let mut changed = 0;
        for i in 0..n {
            if !smo.violates(i, params.tol) {
                continue;
            }
            let j0 = (i + 1 + rng.random_range(0..n - 1)) % n;
            if smo.take_step(i, j0) {
                changed += 1;
                continue;
            }
            let start = rng.random_range(0..n);
            for s in 0..n {
                let j = (start + s) % n;
                if j != i && j != j0 && smo.take_step(i, j) {
                    changed += 1;
                    break;
                }
            }
        }
        passes += 1;
        if changed == 0 {
            break;
        }
    }
    if passes == params.max_passes {
        log::debug!("SMO stopped at the pass limit ({passes})");
    }

    let support_index: Vec<usize> = (0..n).filter(|&i| smo.alpha[i] > 0.0).collect();
    let support_vectors = z.select_rows(&support_index);
    let dual_coef = support_index.iter().map(|&i| smo.alpha[i] * smo.y[i]).collect();
    let cached_decision = smo.g.iter().map(|g| g + smo.b).collect();
    let model = SvmRbfModel { support_vectors, dual_coef, bias: smo.b, gamma, c: params.c, scaler };
    let report = SvmTrainReport { alphas: smo.alpha, cached_decision, support_index, passes };
    Ok((model, report))
}
