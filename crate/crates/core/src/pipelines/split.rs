use std::collections::HashSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::classify::{accuracy, train, ClassifierKind, ClassifierParams};
use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::rng::{derive_seed, rng_from_seed};
use crate::signalgen::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of each class placed in the training side.
    pub train_ratio: f64,
    pub seed: u64,
}

/// Stratified split: each class is shuffled and its first
/// `round(train_ratio * n_class)` members go to training. Both sides keep
/// the original row order.
pub fn split_dataset(ds: &LabeledDataset, spec: &SplitSpec) -> Result<(LabeledDataset, LabeledDataset)> {
    let (tr, te) = split_indices(&ds.labels, spec)?;
    Ok((ds.subset(&tr), ds.subset(&te)))
}

pub fn split_indices(labels: &[u8], spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.train_ratio > 0.0 && spec.train_ratio < 1.0) {
        return Err(invalid(format!("train_ratio {} must lie in (0, 1)", spec.train_ratio)));
    }
    let mut rng = rng_from_seed(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for class in 0..=1u8 {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        let k = (spec.train_ratio * idx.len() as f64).round() as usize;
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    if train.is_empty() || test.is_empty() {
        return Err(invalid(format!(
            "train_ratio {} leaves an empty side for {} samples",
            spec.train_ratio,
            labels.len()
        )));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Ratios 0.1, 0.2, ..., 0.9.
pub fn default_ratio_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}

/// Outcome of the worst-ratio search.
#[derive(Debug, Clone)]
pub struct WorstSplit {
    pub ratio: f64,
    pub baseline_accuracy: f64,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

/// Splits `ds` at every ratio in `ratios`, trains a real-only classifier on
/// each, and keeps the split with the lowest test accuracy (earliest ratio on
/// ties). Ratios that leave a side empty or a class missing from training
/// are skipped.
pub fn worst_ratio_split(
    ds: &LabeledDataset,
    kind: ClassifierKind,
    ratios: &[f64],
    params: &ClassifierParams,
    seed: u64,
) -> Result<WorstSplit> {
    let mut worst: Option<WorstSplit> = None;
    for (k, &ratio) in ratios.iter().enumerate() {
        let spec = SplitSpec { train_ratio: ratio, seed: derive_seed(seed, k as u64) };
        let Ok((train_set, test_set)) = split_dataset(ds, &spec) else {
            continue;
        };
        if train_set.count_label(0) == 0 || train_set.count_label(1) == 0 {
            continue;
        }
        let model = train(kind, &train_set.features(), &train_set.labels, params, derive_seed(seed, 1 << 32))?;
        let acc = accuracy(&model, &test_set.features(), &test_set.labels)?;
        if worst.as_ref().is_none_or(|w| acc < w.baseline_accuracy) {
            worst = Some(WorstSplit { ratio, baseline_accuracy: acc, train: train_set, test: test_set });
        }
    }
    worst.ok_or_else(|| invalid("no ratio in the grid gives a usable split"))
}

fn row_key(row: &[f64]) -> Vec<u64> {
    row.iter().map(|v| v.to_bits()).collect()
}

/// Exact bit-pattern fingerprints of every row.
pub fn fingerprints(m: &Matrix) -> HashSet<Vec<u64>> {
    m.iter_rows().map(row_key).collect()
}

/// Fails if any row of `train` also occurs in `test_prints`.
pub fn assert_disjoint(test_prints: &HashSet<Vec<u64>>, train: &Matrix, what: &str) -> Result<()> {
    if train.iter_rows().any(|r| test_prints.contains(&row_key(r))) {
        return Err(invalid(format!("{what} shares feature vectors with the test set")));
    }
    Ok(())
}
