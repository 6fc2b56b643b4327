use rand::Rng;

use super::{bce_d_loss, bce_g_loss, minimax_g_loss, Activation, DenseNet};
use crate::error::Result;
use crate::matrix::Matrix;
use crate::rng::{rng_for, standard_normal};

const STEP: f64 = 1e-5;
const FLOOR: f64 = 1e-6;

/// Largest relative difference between backprop and central finite
/// differences over every parameter of `net`. `loss_fn` maps the network
/// output to `(loss, dL/d output)`.
pub fn gradcheck<F>(net: &DenseNet, loss_fn: F, batch: &Matrix) -> Result<f64>
where
    F: Fn(&Matrix) -> (f64, Matrix),
{
    let acts = net.forward(batch)?;
    let (_, dout) = loss_fn(acts.output());
    let (grads, _) = net.backward(&acts, &dout)?;
    let analytic: Vec<f64> = grads.iter().collect();

    let mut probe = net.clone();
    let mut worst = 0.0f64;
    for (i, &a) in analytic.iter().enumerate() {
        let orig = *probe.param_mut(i);
        *probe.param_mut(i) = orig + STEP;
        let up = loss_fn(&probe.predict(batch)?).0;
        *probe.param_mut(i) = orig - STEP;
        let down = loss_fn(&probe.predict(batch)?).0;
        *probe.param_mut(i) = orig;
        let numeric = (up - down) / (2.0 * STEP);
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(FLOOR);
        worst = worst.max(rel);
    }
    Ok(worst)
}

/// Adapts a per-probability loss to a one-column network output.
fn column_loss(out: &Matrix, f: impl Fn(&[f64]) -> (f64, Vec<f64>)) -> (f64, Matrix) {
    let (l, g) = f(out.as_slice());
    (l, Matrix::from_vec(out.rows(), 1, g).expect("one column"))
}

/// Discriminator loss with the first half of the batch treated as real.
fn d_loss(out: &Matrix) -> (f64, Matrix) {
    let p = out.as_slice();
    let half = p.len() / 2;
    let (l, gr, gf) = bce_d_loss(&p[..half], &p[half..]);
    let mut g = gr;
    g.extend(gf);
    (l, Matrix::from_vec(out.rows(), 1, g).expect("one column"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradcheckReport {
    pub nets: usize,
    /// Worst error per loss: discriminator BCE, non-saturating G, minimax G.
    pub max_rel_error: [f64; 3],
}

impl GradcheckReport {
    pub fn worst(&self) -> f64 {
        self.max_rel_error.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs [`gradcheck`] on `n_nets` random leaky-ReLU/sigmoid nets (depth 1-3,
/// width 4-8) under each of the three GAN losses.
pub fn gradcheck_suite(n_nets: usize, seed: u64) -> Result<GradcheckReport> {
    let mut worst = [0.0f64; 3];
    for k in 0..n_nets {
        let mut rng = rng_for(seed, k as u64);
        let input = rng.random_range(2..=6);
        let depth = rng.random_range(1..=3);
        let hidden: Vec<usize> = (0..depth - 1).map(|_| rng.random_range(4..=8)).collect();
        let mut net =
            DenseNet::mlp(input, &hidden, 1, Activation::LeakyRelu(0.2), Activation::Sigmoid, &mut rng);
        // nonzero biases so every code path is exercised
        for l in &mut net.layers {
            l.bias.iter_mut().for_each(|b| *b = 0.1 * standard_normal(&mut rng));
        }
        let rows = 2 * rng.random_range(2..=4);
        let batch = Matrix::from_vec(
            rows,
            input,
            (0..rows * input).map(|_| standard_normal(&mut rng)).collect(),
        )?;
        worst[0] = worst[0].max(gradcheck(&net, d_loss, &batch)?);
        worst[1] = worst[1].max(gradcheck(&net, |o| column_loss(o, bce_g_loss), &batch)?);
        worst[2] = worst[2].max(gradcheck(&net, |o| column_loss(o, minimax_g_loss), &batch)?);
    }
    Ok(GradcheckReport { nets: n_nets, max_rel_error: worst })
}
