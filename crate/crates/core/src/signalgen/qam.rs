use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Normalises the {±1, ±3} grid to unit average symbol power.
pub const QAM16_SCALE: f64 = 0.316_227_766_016_837_94; // 1/sqrt(10)

/// Gray-coded 2-bit to amplitude map for one axis.
fn gray_level(b0: u8, b1: u8) -> f64 {
    match (b0 & 1, b1 & 1) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        _ => 3.0,
    }
}

/// Maps bits (one per byte, 0 or 1) to unit-power Gray-coded 16QAM. The first
/// two bits of each group select the in-phase level, the last two quadrature.
pub fn map_16qam(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(4) {
        return Err(invalid(format!("{} bits is not a multiple of 4", bits.len())));
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(invalid(format!("bit value {b} is not 0 or 1")));
    }
    Ok(bits
        .chunks_exact(4)
        .map(|g| {
            Complex64::new(gray_level(g[0], g[1]) * QAM16_SCALE, gray_level(g[2], g[3]) * QAM16_SCALE)
        })
        .collect())
}
