//! OFDM transmit chain, Rayleigh block fading and AWGN.
//!
//! A frame is either pure noise (label 0) or a faded, noisy OFDM burst
//! (label 1). Frames are flattened into interleaved I/Q feature vectors for
//! the networks and classifiers.

mod channel;
mod dataset;
mod ofdm;
mod qam;
pub mod siqd;

pub use channel::{add_awgn, apply_channel, draw_rayleigh_taps};
pub use dataset::{generate_dataset, LabeledDataset};
pub use ofdm::{build_ofdm_frame, random_ofdm_frame};
pub use qam::{map_16qam, QAM16_SCALE};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constellation {
    #[default]
    Qam16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmConfig {
    /// Data subcarriers per OFDM symbol (IDFT size).
    pub n_data: usize,
    /// Cyclic-prefix length in samples.
    pub n_cp: usize,
    /// OFDM symbols per frame.
    pub k_symbols: usize,
    pub constellation: Constellation,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self { n_data: 32, n_cp: 8, k_symbols: 1, constellation: Constellation::Qam16 }
    }
}

impl OfdmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_data == 0 || !self.n_data.is_power_of_two() {
            return Err(invalid(format!("n_data = {} is not a power of two", self.n_data)));
        }
        if self.n_cp >= self.n_data {
            return Err(invalid(format!(
                "cyclic prefix {} must be shorter than {} subcarriers",
                self.n_cp, self.n_data
            )));
        }
        if self.k_symbols == 0 {
            return Err(invalid("k_symbols must be at least 1"));
        }
        Ok(())
    }

    /// Complex samples per OFDM symbol including the prefix.
    pub fn symbol_len(&self) -> usize {
        self.n_cp + self.n_data
    }

    /// `N = K (N_c + N_d)`.
    pub fn frame_len(&self) -> usize {
        self.k_symbols * self.symbol_len()
    }

    pub fn feature_len(&self) -> usize {
        2 * self.frame_len()
    }
}

/// Which signal power the noise variance is calibrated against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrReference {
    /// Average power of the faded signal at the sensor.
    #[default]
    Received,
    /// Average power of the transmitted OFDM waveform.
    Transmit,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelEnv {
    pub n_taps: usize,
    /// Total expected tap power σ².
    pub variance: f64,
    pub snr_db: f64,
    pub snr_reference: SnrReference,
}

impl Default for ChannelEnv {
    fn default() -> Self {
        Self { n_taps: 4, variance: 1.0, snr_db: 0.0, snr_reference: SnrReference::Received }
    }
}

impl ChannelEnv {
    pub fn new(variance: f64, snr_db: f64) -> Self {
        Self { variance, snr_db, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_taps == 0 {
            return Err(invalid("channel needs at least one tap"));
        }
        if !(self.variance > 0.0 && self.variance.is_finite()) {
            return Err(invalid(format!("channel variance {} must be positive", self.variance)));
        }
        if !self.snr_db.is_finite() {
            return Err(invalid("snr_db must be finite"));
        }
        Ok(())
    }
}

/// One received record of `N` complex baseband samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IqFrame {
    pub samples: Vec<Complex64>,
}

impl IqFrame {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self { samples }
    }

    pub fn zeros(n: usize) -> Self {
        Self { samples: vec![Complex64::new(0.0, 0.0); n] }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `|s|²` over the frame.
    pub fn power(&self) -> f64 {
        if self.samples.is_empty() {
            return 0.0;
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.samples.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|s| s.re.is_finite() && s.im.is_finite())
    }
}

/// Interleaved `[Re s0, Im s0, Re s1, ...]`.
pub fn frame_to_features(frame: &IqFrame) -> Vec<f64> {
    frame.samples.iter().flat_map(|s| [s.re, s.im]).collect()
}

pub fn features_to_frame(features: &[f64]) -> Result<IqFrame> {
    if !features.len().is_multiple_of(2) {
        return Err(invalid(format!("odd feature length {}", features.len())));
    }
    Ok(IqFrame::new(features.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()))
}
