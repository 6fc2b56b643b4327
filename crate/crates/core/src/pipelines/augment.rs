use serde::{Deserialize, Serialize};

use super::report::{EvalRecord, EvalReport, Method};
use super::split::{assert_disjoint, fingerprints};
use crate::classify::{accuracy, train, Classifier, ClassifierKind, ClassifierParams};
use crate::error::{invalid, Result};
use crate::gan::{sample_cgan, train_cgan, CganBundle, TrainHistory};
use crate::matrix::Matrix;
use crate::nncore::TrainHyper;
use crate::rng::{derive_path, derive_seed, rng_from_seed};
use crate::signalgen::LabeledDataset;

/// How many synthetic rows to add.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SynthSize {
    /// `round(m * n_real)`.
    Multiplier(f64),
    Count(usize),
}

impl SynthSize {
    pub fn resolve(self, n_real: usize) -> Result<usize> {
        match self {
            SynthSize::Multiplier(m) if m >= 0.0 && m.is_finite() => Ok((m * n_real as f64).round() as usize),
            SynthSize::Multiplier(m) => Err(invalid(format!("synthetic multiplier {m} must be >= 0"))),
            SynthSize::Count(n) => Ok(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AugmentSpec {
    pub synth: SynthSize,
    /// CGAN settings; the seed field is replaced by one derived from the run seed.
    pub gan: TrainHyper,
    pub classifiers: Vec<ClassifierKind>,
    pub classifier_params: ClassifierParams,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        Self {
            synth: SynthSize::Multiplier(4.0),
            gan: TrainHyper::default(),
            classifiers: vec![ClassifierKind::RandomForest, ClassifierKind::SvmRbf],
            classifier_params: ClassifierParams::default(),
        }
    }
}

/// Everything an augmentation run produced.
#[derive(Debug, Clone)]
pub struct AugmentRun {
    pub report: EvalReport,
    /// Absent when no synthetic rows were requested.
    pub cgan: Option<CganBundle>,
    pub history: Option<TrainHistory>,
    /// Real-only classifiers, one per requested kind.
    pub baseline: Vec<Classifier>,
    /// `(n_synth, classifier)` for every requested size and kind.
    pub augmented: Vec<(usize, Classifier)>,
}

/// Label-balanced synthetic set: `n / 2` rows of label 0 then the rest of
/// label 1.
pub fn sample_balanced(bundle: &CganBundle, n: usize, seed: u64) -> Result<(Matrix, Vec<u8>)> {
    let mut rng = rng_from_seed(seed);
    let n0 = n / 2;
    let x = sample_cgan(bundle, 0, n0, &mut rng)?.vcat(&sample_cgan(bundle, 1, n - n0, &mut rng)?)?;
    let mut y = vec![0u8; n0];
    y.resize(n, 1);
    Ok((x, y))
}

/// Trains a CGAN on `train`, then for each requested classifier kind trains
/// a real-only classifier and a real-plus-synthetic classifier and scores
/// both on `test`. Produces two records per kind.
pub fn run_augmentation(
    train_set: &LabeledDataset,
    test_set: &LabeledDataset,
    spec: &AugmentSpec,
    seed: u64,
) -> Result<AugmentRun> {
    let n = spec.synth.resolve(train_set.len())?;
    augment_sizes(train_set, test_set, &[n], spec, seed)
}

/// Like [`run_augmentation`] for several synthetic sizes sharing one CGAN.
/// The baseline is trained once per kind and reported once per size.
pub fn augment_sizes(
    train_set: &LabeledDataset,
    test_set: &LabeledDataset,
    sizes: &[usize],
    spec: &AugmentSpec,
    seed: u64,
) -> Result<AugmentRun> {
    if train_set.count_label(0) == 0 || train_set.count_label(1) == 0 {
        return Err(invalid("augmentation needs both classes in the training set"));
    }
    if test_set.is_empty() {
        return Err(invalid("empty test set"));
    }
    let x_train = train_set.features();
    let x_test = test_set.features();
    let test_prints = fingerprints(&x_test);
    assert_disjoint(&test_prints, &x_train, "training set")?;

    let (cgan, history) = if sizes.iter().any(|&n| n > 0) {
        let hyper = TrainHyper { seed: derive_seed(seed, 1), ..spec.gan.clone() };
        let (b, h) = train_cgan(&x_train, &train_set.labels, &hyper)?;
        (Some(b), Some(h))
    } else {
        (None, None)
    };

    let mut synth = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let (xs, ys) = match &cgan {
            Some(b) if n > 0 => sample_balanced(b, n, derive_path(seed, &[2, n as u64]))?,
            _ => (Matrix::zeros(0, x_train.cols()), Vec::new()),
        };
        assert_disjoint(&test_prints, &xs, "synthetic set")?;
        let mut labels = train_set.labels.clone();
        labels.extend(ys);
        synth.push((n, x_train.vcat(&xs)?, labels));
    }

    let clf_seed = derive_seed(seed, 3);
    let ratio = train_set.len() as f64 / (train_set.len() + test_set.len()) as f64;
    let record = |kind, method, n_synth, accuracy| EvalRecord {
        snr_db: train_set.env.snr_db,
        classifier: kind,
        method,
        train_ratio: ratio,
        n_real: train_set.len(),
        n_synth,
        seed,
        accuracy,
    };
    let mut report = EvalReport::default();
    let mut baseline = Vec::new();
    let mut augmented = Vec::new();
    for &kind in &spec.classifiers {
        let c1 = train(kind, &x_train, &train_set.labels, &spec.classifier_params, clf_seed)?;
        let a1 = accuracy(&c1, &x_test, &test_set.labels)?;
        for (n, x_aug, y_aug) in &synth {
            let c2 = train(kind, x_aug, y_aug, &spec.classifier_params, clf_seed)?;
            let a2 = accuracy(&c2, &x_test, &test_set.labels)?;
            report.records.push(record(kind, Method::Baseline, *n, a1));
            report.records.push(record(kind, Method::Augmented, *n, a2));
            augmented.push((*n, c2));
        }
        baseline.push(c1);
    }
    Ok(AugmentRun { report, cgan, history, baseline, augmented })
}
