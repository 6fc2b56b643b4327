use num_complex::Complex64;
use rayon::prelude::*;

use super::channel::{complex_gaussian, noise_variance};
use super::{
    apply_channel, draw_rayleigh_taps, frame_to_features, random_ofdm_frame, ChannelEnv, IqFrame,
    OfdmConfig, SnrReference,
};
use crate::error::{invalid, shape, Result};
use crate::matrix::Matrix;
use crate::rng::{rng_for, SimRng};

/// Frames with binary emitter labels (0 = noise only, 1 = emitter present).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub frames: Vec<IqFrame>,
    pub labels: Vec<u8>,
    pub env: ChannelEnv,
    /// `None` when loaded from a file that does not record the OFDM layout.
    pub ofdm: Option<OfdmConfig>,
    pub seed: u64,
}

impl LabeledDataset {
    pub fn new(
        frames: Vec<IqFrame>,
        labels: Vec<u8>,
        env: ChannelEnv,
        ofdm: Option<OfdmConfig>,
        seed: u64,
    ) -> Result<Self> {
        if frames.len() != labels.len() {
            return Err(shape(format!("{} frames but {} labels", frames.len(), labels.len())));
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(invalid("labels must be 0 or 1"));
        }
        if let Some(first) = frames.first() {
            if frames.iter().any(|f| f.len() != first.len()) {
                return Err(shape("frames have differing lengths"));
            }
        }
        Ok(Self { frames, labels, env, ofdm, seed })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Complex samples per frame (0 for an empty dataset).
    pub fn frame_len(&self) -> usize {
        self.frames.first().map_or(0, IqFrame::len)
    }

    pub fn feature_len(&self) -> usize {
        2 * self.frame_len()
    }

    pub fn count_label(&self, label: u8) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    /// One interleaved I/Q feature row per frame.
    pub fn features(&self) -> Matrix {
        let cols = self.feature_len();
        let mut data = Vec::with_capacity(self.len() * cols);
        for f in &self.frames {
            data.extend(frame_to_features(f));
        }
        Matrix::from_vec(self.len(), cols, data).expect("frame lengths checked on construction")
    }

    pub fn subset(&self, idx: &[usize]) -> LabeledDataset {
        LabeledDataset {
            frames: idx.iter().map(|&i| self.frames[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            env: self.env,
            ofdm: self.ofdm,
            seed: self.seed,
        }
    }
}

/// Generates `n_samples` frames, alternating label 0 and label 1 so the
/// classes are balanced within one.
///
/// Frame `i` draws everything from its own stream derived from `(seed, i)`,
/// so generation is order independent. Each emitter frame gets fresh payload
/// bits and fresh channel taps. The noise variance is shared by all frames
/// and calibrated to `env.snr_db` against the dataset's average signal power
/// at the chosen reference point.
pub fn generate_dataset(
    n_samples: usize,
    cfg: &OfdmConfig,
    env: &ChannelEnv,
    seed: u64,
) -> Result<LabeledDataset> {
    if n_samples < 2 {
        return Err(invalid(format!("need at least 2 samples, got {n_samples}")));
    }
    cfg.validate()?;
    env.validate()?;
    let n = cfg.frame_len();

    struct Partial {
        label: u8,
        tx_power: f64,
        clean: IqFrame,
        rng: SimRng,
    }

    let partials: Vec<Partial> = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<Partial> {
            let mut rng = rng_for(seed, i as u64);
            let label = (i % 2) as u8;
            if label == 0 {
                return Ok(Partial { label, tx_power: 0.0, clean: IqFrame::zeros(n), rng });
            }
            let tx = random_ofdm_frame(cfg, &mut rng)?;
            let taps = draw_rayleigh_taps(env, &mut rng);
            let clean = apply_channel(&tx, &taps)?;
            Ok(Partial { label, tx_power: tx.power(), clean, rng })
        })
        .collect::<Result<_>>()?;

    let emitters: Vec<&Partial> = partials.iter().filter(|p| p.label == 1).collect();
    let ref_power = match env.snr_reference {
        SnrReference::Received => {
            emitters.iter().map(|p| p.clean.power()).sum::<f64>() / emitters.len() as f64
        }
        SnrReference::Transmit => {
            emitters.iter().map(|p| p.tx_power).sum::<f64>() / emitters.len() as f64
        }
    };
    if ref_power.is_nan() || ref_power <= 0.0 {
        return Err(invalid("emitter frames carry no signal power"));
    }
    let var = noise_variance(env.snr_db, ref_power);

    let (frames, labels): (Vec<IqFrame>, Vec<u8>) = partials
        .into_par_iter()
        .map(|mut p| {
            let samples: Vec<Complex64> =
                p.clean.samples.iter().map(|s| s + complex_gaussian(&mut p.rng, var)).collect();
            (IqFrame::new(samples), p.label)
        })
        .unzip();

    LabeledDataset::new(frames, labels, *env, Some(*cfg), seed)
}
