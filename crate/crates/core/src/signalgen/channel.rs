use num_complex::Complex64;
use rand::Rng;

use super::{ChannelEnv, IqFrame};
use crate::error::{invalid, Result};
use crate::rng::standard_normal;

/// Circularly-symmetric complex Gaussian with `E|c|² = var`.
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let sd = (var / 2.0).sqrt();
    let re = standard_normal(rng) * sd;
    let im = standard_normal(rng) * sd;
    Complex64::new(re, im)
}

/// Uniform power-delay profile: each tap carries `σ² / n_taps`.
pub fn draw_rayleigh_taps<R: Rng + ?Sized>(env: &ChannelEnv, rng: &mut R) -> Vec<Complex64> {
    let per_tap = env.variance / env.n_taps as f64;
    (0..env.n_taps).map(|_| complex_gaussian(rng, per_tap)).collect()
}

/// Linear convolution with `taps`, truncated to the frame length.
pub fn apply_channel(frame: &IqFrame, taps: &[Complex64]) -> Result<IqFrame> {
    if taps.is_empty() {
        return Err(invalid("channel has no taps"));
    }
    let x = &frame.samples;
    let out = (0..x.len())
        .map(|n| taps.iter().take(n + 1).enumerate().map(|(k, h)| h * x[n - k]).sum())
        .collect();
    Ok(IqFrame::new(out))
}

/// Adds noise with per-sample variance `signal_power / 10^(snr_db/10)`.
pub fn add_awgn<R: Rng + ?Sized>(
    frame: &IqFrame,
    snr_db: f64,
    signal_power: f64,
    rng: &mut R,
) -> Result<IqFrame> {
    if !(signal_power > 0.0 && signal_power.is_finite()) {
        return Err(invalid(format!("signal power {signal_power} must be positive")));
    }
    let var = noise_variance(snr_db, signal_power);
    Ok(IqFrame::new(frame.samples.iter().map(|s| s + complex_gaussian(rng, var)).collect()))
}

pub(crate) fn noise_variance(snr_db: f64, signal_power: f64) -> f64 {
    signal_power / 10f64.powf(snr_db / 10.0)
}
