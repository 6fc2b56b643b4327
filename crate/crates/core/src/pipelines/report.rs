use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::classify::ClassifierKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Method {
    /// Real training data only.
    #[serde(rename = "baseline")]
    Baseline,
    /// Real plus GAN-generated training data.
    #[serde(rename = "augmented")]
    Augmented,
    /// Trained on the old environment, scored on the new one.
    #[serde(rename = "old-classifier")]
    OldClassifier,
    /// Trained on old-environment data mapped into the new environment.
    #[serde(rename = "adapted")]
    Adapted,
    /// Trained on labeled new-environment data.
    #[serde(rename = "ideal")]
    Ideal,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::Augmented => "augmented",
            Method::OldClassifier => "old-classifier",
            Method::Adapted => "adapted",
            Method::Ideal => "ideal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub snr_db: f64,
    pub classifier: ClassifierKind,
    pub method: Method,
    pub train_ratio: f64,
    pub n_real: usize,
    pub n_synth: usize,
    pub seed: u64,
    pub accuracy: f64,
}

impl EvalRecord {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.snr_db
            .total_cmp(&other.snr_db)
            .then(self.classifier.cmp(&other.classifier))
            .then(self.method.cmp(&other.method))
            .then(self.train_ratio.total_cmp(&other.train_ratio))
            .then(self.n_real.cmp(&other.n_real))
            .then(self.n_synth.cmp(&other.n_synth))
            .then(self.seed.cmp(&other.seed))
            .then(self.accuracy.total_cmp(&other.accuracy))
    }
}

pub const CSV_HEADER: &str = "snr_db,classifier,method,train_ratio,n_real,n_synth,seed,accuracy";
pub const AGGREGATE_HEADER: &str = "snr_db,classifier,method,train_ratio,n_synth,replicates,mean,min,max";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub records: Vec<EvalRecord>,
}

/// Mean/min/max accuracy of one grid cell across seed replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub snr_db: f64,
    pub classifier: ClassifierKind,
    pub method: Method,
    /// `None` when replicates used different ratios (worst-ratio search).
    pub train_ratio: Option<f64>,
    pub n_synth: usize,
    pub replicates: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl EvalReport {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn extend(&mut self, other: EvalReport) {
        self.records.extend(other.records);
    }

    pub fn sort(&mut self) {
        self.records.sort_by(EvalRecord::cmp_key);
    }

    pub fn filter(&self, pred: impl Fn(&EvalRecord) -> bool) -> Vec<&EvalRecord> {
        self.records.iter().filter(|r| pred(r)).collect()
    }

    /// Rows sorted by every key column.
    pub fn to_csv(&self) -> String {
        let mut sorted = self.clone();
        sorted.sort();
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &sorted.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.snr_db,
                r.classifier,
                r.method.name(),
                r.train_ratio,
                r.n_real,
                r.n_synth,
                r.seed,
                r.accuracy
            )
            .expect("String write");
        }
        out
    }

    /// Groups records by (SNR, classifier, method, n_synth), pooling seeds
    /// and, under the worst-ratio protocol, the per-seed ratios.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut sorted = self.records.clone();
        sorted.sort_by(|a, b| {
            a.snr_db
                .total_cmp(&b.snr_db)
                .then(a.classifier.cmp(&b.classifier))
                .then(a.method.cmp(&b.method))
                .then(a.n_synth.cmp(&b.n_synth))
        });
        let mut rows: Vec<AggregateRow> = Vec::new();
        let mut sums: Vec<f64> = Vec::new();
        for r in &sorted {
            let same = rows.last().is_some_and(|g| {
                g.snr_db == r.snr_db && g.classifier == r.classifier && g.method == r.method && g.n_synth == r.n_synth
            });
            if same {
                let g = rows.last_mut().expect("checked");
                if g.train_ratio != Some(r.train_ratio) {
                    g.train_ratio = None;
                }
                g.replicates += 1;
                g.min = g.min.min(r.accuracy);
                g.max = g.max.max(r.accuracy);
                *sums.last_mut().expect("parallel to rows") += r.accuracy;
            } else {
                rows.push(AggregateRow {
                    snr_db: r.snr_db,
                    classifier: r.classifier,
                    method: r.method,
                    train_ratio: Some(r.train_ratio),
                    n_synth: r.n_synth,
                    replicates: 1,
                    mean: 0.0,
                    min: r.accuracy,
                    max: r.accuracy,
                });
                sums.push(r.accuracy);
            }
        }
        for (g, s) in rows.iter_mut().zip(sums) {
            g.mean = (s / g.replicates as f64).clamp(g.min, g.max);
        }
        rows
    }

    /// Aggregate table; a pooled ratio column is written as `worst`.
    pub fn aggregate_csv(&self) -> String {
        let mut out = String::from(AGGREGATE_HEADER);
        out.push('\n');
        for g in self.aggregate() {
            let ratio = g.train_ratio.map_or_else(|| "worst".to_string(), |r| r.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                g.snr_db,
                g.classifier,
                g.method.name(),
                ratio,
                g.n_synth,
                g.replicates,
                g.mean,
                g.min,
                g.max
            )
            .expect("String write");
        }
        out
    }
}

/// Mean of a slice, `NaN` when empty.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}
