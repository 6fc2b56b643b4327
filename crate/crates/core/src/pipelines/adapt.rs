use super::report::{EvalRecord, EvalReport, Method};
use super::split::{assert_disjoint, fingerprints, split_dataset, SplitSpec};
use crate::classify::{accuracy, train, Classifier, ClassifierKind, ClassifierParams};
use crate::error::{invalid, shape, Result};
use crate::gan::{encode, generate_adapted, train_adaptation_cgan, train_bigan, AdaptationBundle, BiganBundle};
use crate::matrix::Matrix;
use crate::nncore::TrainHyper;
use crate::rng::derive_seed;
use crate::signalgen::LabeledDataset;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptSpec {
    pub bigan: TrainHyper,
    pub gan: TrainHyper,
    pub classifier: ClassifierKind,
    pub classifier_params: ClassifierParams,
    /// Share of the labeled new-environment set used to train the ideal
    /// classifier; the rest is the common test set.
    pub ideal_ratio: f64,
    /// Start the adaptation generator from the BiGAN generator.
    pub warm_start: bool,
}

impl Default for AdaptSpec {
    fn default() -> Self {
        Self {
            bigan: TrainHyper::default(),
            gan: TrainHyper::default(),
            classifier: ClassifierKind::SvmRbf,
            classifier_params: ClassifierParams::default(),
            ideal_ratio: 0.5,
            warm_start: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdaptRun {
    /// Old, adapted and ideal records, all scored on the same test split.
    pub report: EvalReport,
    pub bigan: BiganBundle,
    pub adaptation: AdaptationBundle,
    /// The generated new-environment training set with the old labels.
    pub adapted_features: Matrix,
    pub old: Classifier,
    pub adapted: Classifier,
    pub ideal: Classifier,
}

/// Maps labeled old-environment data into the new environment and compares
/// three classifiers on held-out new-environment data: one trained on the
/// old data, one on the adapted data, and one on labeled new data.
///
/// `t2_eval` is only used for the ideal classifier and for scoring; the
/// adaptation itself sees `t2_unlabeled` without labels.
pub fn run_adaptation(
    t1: &LabeledDataset,
    t2_unlabeled: &Matrix,
    t2_eval: &LabeledDataset,
    spec: &AdaptSpec,
    seed: u64,
) -> Result<AdaptRun> {
    let x1 = t1.features();
    if x1.cols() != t2_unlabeled.cols() || x1.cols() != t2_eval.feature_len() {
        return Err(shape(format!(
            "feature widths differ: old {}, new unlabeled {}, new labeled {}",
            x1.cols(),
            t2_unlabeled.cols(),
            t2_eval.feature_len()
        )));
    }
    if t1.count_label(0) == 0 || t1.count_label(1) == 0 {
        return Err(invalid("old-environment data needs both classes"));
    }
    let split = SplitSpec { train_ratio: spec.ideal_ratio, seed: derive_seed(seed, 3) };
    let (ideal_train, test) = split_dataset(t2_eval, &split)?;
    let x_test = test.features();
    let prints = fingerprints(&x_test);
    assert_disjoint(&prints, &x1, "old-environment set")?;
    assert_disjoint(&prints, t2_unlabeled, "unlabeled new-environment set")?;
    let x_ideal = ideal_train.features();
    assert_disjoint(&prints, &x_ideal, "ideal training split")?;

    let bigan_hyper = TrainHyper { seed: derive_seed(seed, 1), ..spec.bigan.clone() };
    let (bigan, _) = train_bigan(&x1, &bigan_hyper)?;
    let latents = encode(&bigan, &x1)?;
    let gan_hyper = TrainHyper { seed: derive_seed(seed, 2), ..spec.gan.clone() };
    let warm = spec.warm_start.then_some(&bigan.generator);
    let (adaptation, _) = train_adaptation_cgan(t2_unlabeled, &latents, &t1.labels, &gan_hyper, warm)?;
    let adapted_features = generate_adapted(&adaptation, &latents, &t1.labels)?;
    assert_disjoint(&prints, &adapted_features, "adapted set")?;

    let clf_seed = derive_seed(seed, 4);
    let p = &spec.classifier_params;
    let old = train(spec.classifier, &x1, &t1.labels, p, clf_seed)?;
    let adapted = train(spec.classifier, &adapted_features, &t1.labels, p, clf_seed)?;
    let ideal = train(spec.classifier, &x_ideal, &ideal_train.labels, p, clf_seed)?;

    let mut report = EvalReport::default();
    for (method, model, n_real, n_synth) in [
        (Method::OldClassifier, &old, t1.len(), 0),
        (Method::Adapted, &adapted, 0, adapted_features.rows()),
        (Method::Ideal, &ideal, ideal_train.len(), 0),
    ] {
        report.records.push(EvalRecord {
            snr_db: t2_eval.env.snr_db,
            classifier: spec.classifier,
            method,
            train_ratio: spec.ideal_ratio,
            n_real,
            n_synth,
            seed,
            accuracy: accuracy(model, &x_test, &test.labels)?,
        });
    }
    Ok(AdaptRun { report, bigan, adaptation, adapted_features, old, adapted, ideal })
}
