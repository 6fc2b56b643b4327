use num_complex::Complex64;
use rand::Rng;
use rustfft::FftPlanner;

use super::{map_16qam, IqFrame, OfdmConfig};
use crate::error::{invalid, Result};

/// Builds one frame from `K * N_d` subcarrier symbols: a unitary IDFT per OFDM
/// symbol, each prefixed by the last `N_c` samples of its body.
pub fn build_ofdm_frame(symbols: &[Complex64], cfg: &OfdmConfig) -> Result<IqFrame> {
    cfg.validate()?;
    let need = cfg.k_symbols * cfg.n_data;
    if symbols.len() != need {
        return Err(invalid(format!("frame needs {need} subcarrier symbols, got {}", symbols.len())));
    }
    let ifft = FftPlanner::<f64>::new().plan_fft_inverse(cfg.n_data);
    let norm = 1.0 / (cfg.n_data as f64).sqrt();
    let mut out = Vec::with_capacity(cfg.frame_len());
    for block in symbols.chunks_exact(cfg.n_data) {
        let mut body = block.to_vec();
        ifft.process(&mut body);
        body.iter_mut().for_each(|s| *s *= norm);
        out.extend_from_slice(&body[cfg.n_data - cfg.n_cp..]);
        out.extend_from_slice(&body);
    }
    Ok(IqFrame::new(out))
}

/// Random 16QAM payload on every subcarrier.
pub fn random_ofdm_frame<R: Rng + ?Sized>(cfg: &OfdmConfig, rng: &mut R) -> Result<IqFrame> {
    let bits: Vec<u8> = (0..4 * cfg.k_symbols * cfg.n_data).map(|_| rng.random_range(0..2u8)).collect();
    build_ofdm_frame(&map_16qam(&bits)?, cfg)
}
