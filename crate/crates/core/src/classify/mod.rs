//! Spectrum-sensing detectors: a CART random forest and an RBF-kernel SVM
//! trained with SMO.

mod forest;
pub mod io;
mod svm;

pub use forest::{train_random_forest, ForestParams, Node, RandomForestModel, Tree};
pub use svm::{train_svm_rbf, train_svm_rbf_detailed, SvmParams, SvmRbfModel, SvmTrainReport};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, shape, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "rf")]
    RandomForest,
    #[serde(rename = "svm")]
    SvmRbf,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::RandomForest => "rf",
            ClassifierKind::SvmRbf => "svm",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rf" => Some(ClassifierKind::RandomForest),
            "svm" => Some(ClassifierKind::SvmRbf),
            _ => None,
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters for both detector families.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierParams {
    pub forest: ForestParams,
    pub svm: SvmParams,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Forest(RandomForestModel),
    Svm(SvmRbfModel),
}

impl Classifier {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            Classifier::Forest(_) => ClassifierKind::RandomForest,
            Classifier::Svm(_) => ClassifierKind::SvmRbf,
        }
    }

    pub fn predict(&self, features: &Matrix) -> Result<Vec<u8>> {
        match self {
            Classifier::Forest(m) => m.predict(features),
            Classifier::Svm(m) => m.predict(features),
        }
    }
}

pub fn train(
    kind: ClassifierKind,
    features: &Matrix,
    labels: &[u8],
    params: &ClassifierParams,
    seed: u64,
) -> Result<Classifier> {
    Ok(match kind {
        ClassifierKind::RandomForest => {
            Classifier::Forest(train_random_forest(features, labels, &params.forest, seed)?)
        }
        ClassifierKind::SvmRbf => Classifier::Svm(train_svm_rbf(features, labels, &params.svm, seed)?),
    })
}

/// Exact-match fraction.
pub fn accuracy(model: &Classifier, features: &Matrix, labels: &[u8]) -> Result<f64> {
    if features.rows() != labels.len() {
        return Err(shape(format!("{} rows but {} labels", features.rows(), labels.len())));
    }
    if labels.is_empty() {
        return Err(invalid("accuracy of an empty set is undefined"));
    }
    let pred = model.predict(features)?;
    Ok(label_accuracy(&pred, labels))
}

pub fn label_accuracy(pred: &[u8], truth: &[u8]) -> f64 {
    let hits = pred.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len().max(1) as f64
}

pub(crate) fn check_training_set(features: &Matrix, labels: &[u8]) -> Result<()> {
    if features.rows() != labels.len() {
        return Err(shape(format!("{} rows but {} labels", features.rows(), labels.len())));
    }
    if labels.is_empty() {
        return Err(invalid("empty training set"));
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(invalid("labels must be 0 or 1"));
    }
    if !features.all_finite() {
        return Err(invalid("training features contain non-finite values"));
    }
    Ok(())
}
