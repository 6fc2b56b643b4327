//! Binary cross-entropy objectives for adversarial training.
//!
//! All losses are means over the batch and return `dL/dp` for each
//! probability. Probabilities are clamped to `[PROB_CLAMP, 1 - PROB_CLAMP]`
//! before taking logs; the gradient uses the clamped value so it never
//! vanishes to exactly zero.

use serde::{Deserialize, Serialize};

pub const PROB_CLAMP: f64 = 1e-7;

/// Generator-side objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GanLoss {
    /// Minimise `-log D(G(z))`.
    #[default]
    NonSaturating,
    /// Minimise `log(1 - D(G(z)))`, the original minimax form.
    Minimax,
}

fn clamp(p: f64) -> f64 {
    p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
}

/// `-mean[log D(r)] - mean[log(1 - D(G(z)))]`.
pub fn bce_d_loss(d_real: &[f64], d_fake: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let nr = d_real.len().max(1) as f64;
    let nf = d_fake.len().max(1) as f64;
    let mut loss = 0.0;
    let g_real = d_real
        .iter()
        .map(|&p| {
            let p = clamp(p);
            loss -= p.ln() / nr;
            -1.0 / (p * nr)
        })
        .collect();
    let g_fake = d_fake
        .iter()
        .map(|&p| {
            let q = clamp(1.0 - p);
            loss -= q.ln() / nf;
            1.0 / (q * nf)
        })
        .collect();
    (loss, g_real, g_fake)
}

/// `-mean[log D(G(z))]`.
pub fn bce_g_loss(d_fake: &[f64]) -> (f64, Vec<f64>) {
    let n = d_fake.len().max(1) as f64;
    let mut loss = 0.0;
    let g = d_fake
        .iter()
        .map(|&p| {
            let p = clamp(p);
            loss -= p.ln() / n;
            -1.0 / (p * n)
        })
        .collect();
    (loss, g)
}

/// `mean[log(1 - D(G(z)))]`. Non-positive, unlike the other two.
pub fn minimax_g_loss(d_fake: &[f64]) -> (f64, Vec<f64>) {
    let n = d_fake.len().max(1) as f64;
    let mut loss = 0.0;
    let g = d_fake
        .iter()
        .map(|&p| {
            let q = clamp(1.0 - p);
            loss += q.ln() / n;
            -1.0 / (q * n)
        })
        .collect();
    (loss, g)
}

impl GanLoss {
    pub fn generator(self, d_fake: &[f64]) -> (f64, Vec<f64>) {
        match self {
            GanLoss::NonSaturating => bce_g_loss(d_fake),
            GanLoss::Minimax => minimax_g_loss(d_fake),
        }
    }
}
