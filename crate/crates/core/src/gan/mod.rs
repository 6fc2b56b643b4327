//! Adversarial trainers: the label-conditioned GAN used for augmentation,
//! the bidirectional GAN that learns an encoder back into noise space, and
//! the adaptation CGAN that turns encoded old-environment samples into
//! new-environment ones.
//!
//! All trainers work on scaled features (see [`FeatureScaler`]) and return
//! samples in the original feature units.

mod adapt;
mod bigan;
pub mod bundle;
mod cgan;

pub use adapt::{generate_adapted, train_adaptation_cgan, AdaptationBundle};
pub use bigan::{encode, reconstruct, train_bigan, BiganBundle};
pub use cgan::{discriminator_accuracy, sample_cgan, train_cgan, CganBundle, LABEL_DIM};
pub use crate::scaler::{FeatureScaler, Scaling};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::nncore::{adam_step, bce_d_loss, AdamState, DenseNet, GanLoss, TrainHyper};
use crate::rng::standard_normal;

/// Per-step losses; one entry per minibatch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    pub d_loss: Vec<f64>,
    pub g_loss: Vec<f64>,
}

impl TrainHistory {
    pub fn len(&self) -> usize {
        self.d_loss.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_loss.is_empty()
    }

    pub fn all_finite(&self) -> bool {
        self.d_loss.iter().chain(&self.g_loss).all(|v| v.is_finite())
    }
}

pub(crate) fn one_hot(labels: &[u8]) -> Matrix {
    let mut m = Matrix::zeros(labels.len(), LABEL_DIM);
    for (i, &l) in labels.iter().enumerate() {
        m.set(i, l as usize, 1.0);
    }
    m
}

pub(crate) fn check_labels(labels: &[u8]) -> Result<()> {
    match labels.iter().find(|&&l| l as usize >= LABEL_DIM) {
        Some(l) => Err(invalid(format!("unknown label {l}"))),
        None => Ok(()),
    }
}

pub(crate) fn normal_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let data = (0..rows * cols).map(|_| standard_normal(rng)).collect();
    Matrix::from_vec(rows, cols, data).expect("sized above")
}

/// Minibatch index lists for one epoch: a fresh shuffle cut into
/// `ceil(n / batch)` slices.
pub(crate) fn epoch_batches<R: Rng + ?Sized>(n: usize, batch: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch).map(<[usize]>::to_vec).collect()
}

/// A network plus its optimiser state.
#[derive(Debug, Clone)]
pub(crate) struct Trainee {
    pub net: DenseNet,
    pub opt: AdamState,
}

impl Trainee {
    pub fn new(net: DenseNet) -> Self {
        let opt = AdamState::new(&net);
        Self { net, opt }
    }
}

/// One discriminator update on stacked real and fake inputs. Returns the
/// pre-update loss.
pub(crate) fn discriminator_step(
    d: &mut Trainee,
    real_in: &Matrix,
    fake_in: &Matrix,
    hyper: &TrainHyper,
) -> Result<f64> {
    let nr = real_in.rows();
    let stacked = real_in.vcat(fake_in)?;
    let acts = d.net.forward(&stacked)?;
    let p = acts.output().as_slice();
    let (loss, gr, gf) = bce_d_loss(&p[..nr], &p[nr..]);
    let mut g = gr;
    g.extend(gf);
    let grad = Matrix::from_vec(stacked.rows(), 1, g)?;
    let (grads, _) = d.net.backward(&acts, &grad)?;
    adam_step(&mut d.net, &grads, &mut d.opt, hyper)?;
    Ok(loss)
}

/// Loss and `dL/d(input)` for pushing `D(input)` towards "real" (or towards
/// "fake" when `towards_real` is false), leaving `D` untouched.
pub(crate) fn fooling_gradient(
    d: &DenseNet,
    input: &Matrix,
    loss: GanLoss,
    towards_real: bool,
) -> Result<(f64, Matrix)> {
    let acts = d.forward(input)?;
    let p = acts.output().as_slice();
    let (l, g) = if towards_real {
        loss.generator(p)
    } else {
        // mirror image: the same objective applied to 1 - p
        let flipped: Vec<f64> = p.iter().map(|v| 1.0 - v).collect();
        let (l, g) = loss.generator(&flipped);
        (l, g.into_iter().map(|v| -v).collect())
    };
    let grad = Matrix::from_vec(input.rows(), 1, g)?;
    let (_, dx) = d.backward(&acts, &grad)?;
    Ok((l, dx))
}
