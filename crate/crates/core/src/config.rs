//! Experiment configuration files.
//!
//! A config is a TOML document. Only `seed` is required; every other key has
//! a default, so `seed = 1` alone is a valid config. The `version` key is
//! reserved for format changes and must be 1 when present. Unknown keys are
//! rejected. GAN `seed` fields are ignored: trainers draw their seeds from
//! the master seed.
//!
//! ```toml
//! version = 1
//! seed = 42
//! out_dir = "out"
//!
//! [env]                 # environment for `generate` and `augment`
//! n_taps = 4
//! variance = 1.0
//! snr_db = 0.0
//! snr_reference = "received"
//!
//! [dataset]
//! n_samples = 100
//!
//! [split]               # omit train_ratio for the worst-ratio search
//! ratio_grid = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
//!
//! [augment]
//! synth_multiplier = 4.0
//! classifiers = ["rf", "svm"]
//!
//! [gan]
//! epochs = 2000
//!
//! [sweep]
//! snr_db = [0.0, 5.0, 10.0]
//! replicates = 10
//!
//! [adapt]
//! source = { variance = 0.2, snr_db = 5.0 }
//! target = { variance = 2.0, snr_db = 5.0 }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::{ClassifierKind, ClassifierParams, ForestParams, SvmParams};
use crate::error::{Error, Result};
use crate::nncore::TrainHyper;
use crate::pipelines::{default_ratio_grid, AdaptSpec, AugmentSpec, SweepGrid, SynthSize};
use crate::signalgen::{ChannelEnv, OfdmConfig};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub n_samples: usize,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self { n_samples: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    /// Fixed train ratio; `None` selects the worst ratio of `ratio_grid`.
    pub train_ratio: Option<f64>,
    pub ratio_grid: Vec<f64>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { train_ratio: None, ratio_grid: default_ratio_grid() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub synth_multiplier: f64,
    /// Absolute synthetic count; overrides the multiplier.
    pub synth_count: Option<usize>,
    pub classifiers: Vec<ClassifierKind>,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            synth_multiplier: 4.0,
            synth_count: None,
            classifiers: vec![ClassifierKind::RandomForest, ClassifierKind::SvmRbf],
        }
    }
}

impl AugmentConfig {
    pub fn synth(&self) -> SynthSize {
        match self.synth_count {
            Some(n) => SynthSize::Count(n),
            None => SynthSize::Multiplier(self.synth_multiplier),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptConfig {
    pub source: ChannelEnv,
    pub target: ChannelEnv,
    /// Labeled old-environment samples.
    pub n_source: usize,
    /// New-environment samples; split into an unlabeled part fed to the
    /// adaptation GAN and a labeled part for the ideal classifier and scoring.
    pub n_target: usize,
    /// Share of the new-environment samples kept unlabeled.
    pub unlabeled_ratio: f64,
    /// Share of the labeled new-environment part that trains the ideal
    /// classifier.
    pub ideal_ratio: f64,
    pub classifier: ClassifierKind,
    pub warm_start: bool,
    pub gan: TrainHyper,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        Self {
            source: ChannelEnv::new(0.2, 5.0),
            target: ChannelEnv::new(2.0, 5.0),
            n_source: 200,
            n_target: 400,
            unlabeled_ratio: 0.5,
            ideal_ratio: 0.5,
            classifier: ClassifierKind::SvmRbf,
            warm_start: true,
            gan: TrainHyper::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub ofdm: OfdmConfig,
    #[serde(default)]
    pub env: ChannelEnv,
    #[serde(default)]
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub augment: AugmentConfig,
    #[serde(default)]
    pub gan: TrainHyper,
    #[serde(default)]
    pub bigan: TrainHyper,
    #[serde(default)]
    pub forest: ForestParams,
    #[serde(default)]
    pub svm: SvmParams,
    #[serde(default)]
    pub sweep: SweepGrid,
    #[serde(default)]
    pub adapt: AdaptConfig,
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn config_err(msg: impl std::fmt::Display) -> Error {
    Error::Config(msg.to_string())
}

impl ExperimentConfig {
    /// All defaults with the given master seed.
    pub fn with_seed(seed: u64) -> Self {
        Self::from_toml_str(&format!("seed = {seed}")).expect("defaults are valid")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(config_err)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every section; failures are reported as config errors.
    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(config_err(format!("unsupported config version {}", self.version)));
        }
        let wrap = |r: Result<()>, section: &str| r.map_err(|e| config_err(format!("[{section}] {e}")));
        wrap(self.ofdm.validate(), "ofdm")?;
        wrap(self.env.validate(), "env")?;
        wrap(self.adapt.source.validate(), "adapt.source")?;
        wrap(self.adapt.target.validate(), "adapt.target")?;
        wrap(self.gan.validate(), "gan")?;
        wrap(self.bigan.validate(), "bigan")?;
        wrap(self.adapt.gan.validate(), "adapt.gan")?;
        wrap(self.svm.validate(), "svm")?;
        wrap(self.sweep.validate(), "sweep")?;
        if self.dataset.n_samples < 4 {
            return Err(config_err("[dataset] n_samples must be at least 4"));
        }
        let in_unit = |r: f64| r > 0.0 && r < 1.0;
        if let Some(r) = self.split.train_ratio {
            if !in_unit(r) {
                return Err(config_err(format!("[split] train_ratio {r} must lie in (0, 1)")));
            }
        }
        if self.split.ratio_grid.is_empty() || !self.split.ratio_grid.iter().all(|&r| in_unit(r)) {
            return Err(config_err("[split] ratio_grid must be a nonempty list of ratios in (0, 1)"));
        }
        if self.sweep.train_ratios.iter().chain(&self.sweep.ratio_grid).any(|&r| !in_unit(r)) {
            return Err(config_err("[sweep] ratios must lie in (0, 1)"));
        }
        if !(self.augment.synth_multiplier >= 0.0 && self.augment.synth_multiplier.is_finite())
            || self.sweep.synth_multipliers.iter().any(|&m| !(m >= 0.0 && m.is_finite()))
        {
            return Err(config_err("synthetic multipliers must be finite and >= 0"));
        }
        if self.augment.classifiers.is_empty() {
            return Err(config_err("[augment] classifiers must not be empty"));
        }
        if self.forest.n_trees == 0 {
            return Err(config_err("[forest] n_trees must be at least 1"));
        }
        if !in_unit(self.adapt.unlabeled_ratio) || !in_unit(self.adapt.ideal_ratio) {
            return Err(config_err("[adapt] ratios must lie in (0, 1)"));
        }
        if self.adapt.n_source < 4 || self.adapt.n_target < 8 {
            return Err(config_err("[adapt] needs at least 4 source and 8 target samples"));
        }
        Ok(())
    }

    pub fn classifier_params(&self) -> ClassifierParams {
        ClassifierParams { forest: self.forest.clone(), svm: self.svm.clone() }
    }

    pub fn augment_spec(&self) -> AugmentSpec {
        AugmentSpec {
            synth: self.augment.synth(),
            gan: self.gan.clone(),
            classifiers: self.augment.classifiers.clone(),
            classifier_params: self.classifier_params(),
        }
    }

    pub fn adapt_spec(&self) -> AdaptSpec {
        AdaptSpec {
            bigan: self.bigan.clone(),
            gan: self.adapt.gan.clone(),
            classifier: self.adapt.classifier,
            classifier_params: self.classifier_params(),
            ideal_ratio: self.adapt.ideal_ratio,
            warm_start: self.adapt.warm_start,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = ExperimentConfig::from_toml_str("seed = 5").unwrap();
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.dataset.n_samples, 100);
        assert_eq!(cfg.ofdm.feature_len(), 80);
    }

    #[test]
    fn seed_is_required() {
        assert!(matches!(ExperimentConfig::from_toml_str(""), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "seed = 1\nversion = 2",
            "seed = 1\nbogus = 3",
            "seed = 1\n[split]\ntrain_ratio = 1.5",
            "seed = 1\n[env]\nvariance = -1.0",
            "seed = 1\n[sweep]\nsnr_db = []",
            "seed = 1\n[gan]\nbatch_size = 0",
        ] {
            assert!(matches!(ExperimentConfig::from_toml_str(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = ExperimentConfig::with_seed(9);
        assert_eq!(ExperimentConfig::from_toml_str(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn doc_example_parses() {
        let text = "version = 1\nseed = 42\n[adapt]\nsource = { variance = 0.2, snr_db = 5.0 }\n\
                    target = { variance = 2.0, snr_db = 5.0 }\n[augment]\nclassifiers = [\"rf\", \"svm\"]";
        let cfg = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(cfg.adapt.target.variance, 2.0);
        assert_eq!(cfg.adapt.target.n_taps, 4);
    }
}
