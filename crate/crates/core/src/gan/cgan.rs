use rand::Rng;

use super::{
    check_labels, discriminator_step, epoch_batches, fooling_gradient, normal_matrix, one_hot,
    FeatureScaler, Trainee, TrainHistory,
};
use crate::error::{invalid, shape, Result};
use crate::matrix::Matrix;
use crate::nncore::{adam_step, Activation, DenseNet, TrainHyper};
use crate::rng::{rng_for, SimRng};

/// Width of the one-hot label code fed to both networks.
pub const LABEL_DIM: usize = 2;

/// Generator `(z, onehot) -> x` and discriminator `(x, onehot) -> p(real)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CganBundle {
    pub generator: DenseNet,
    pub discriminator: DenseNet,
    pub hyper: TrainHyper,
    pub feature_dim: usize,
    pub scaler: FeatureScaler,
}

impl CganBundle {
    /// Freshly initialised networks; the scaler is the identity.
    pub fn init(feature_dim: usize, hyper: &TrainHyper, rng: &mut SimRng) -> Result<Self> {
        hyper.validate()?;
        let act = hyper.hidden_activation();
        let generator = DenseNet::mlp(
            hyper.noise_dim + LABEL_DIM,
            &hyper.hidden,
            feature_dim,
            act,
            hyper.generator_activation(),
            rng,
        );
        let discriminator =
            DenseNet::mlp(feature_dim + LABEL_DIM, &hyper.hidden, 1, act, Activation::Sigmoid, rng);
        Ok(Self {
            generator,
            discriminator,
            hyper: hyper.clone(),
            feature_dim,
            scaler: FeatureScaler::identity(feature_dim),
        })
    }

    pub fn label_dim(&self) -> usize {
        LABEL_DIM
    }
}

/// Trains a conditional GAN with one discriminator and one generator update
/// per minibatch for `hyper.epochs` epochs. All randomness comes from
/// `hyper.seed`.
pub fn train_cgan(
    features: &Matrix,
    labels: &[u8],
    hyper: &TrainHyper,
) -> Result<(CganBundle, TrainHistory)> {
    hyper.validate()?;
    if features.rows() != labels.len() {
        return Err(shape(format!("{} rows but {} labels", features.rows(), labels.len())));
    }
    check_labels(labels)?;
    for class in 0..LABEL_DIM as u8 {
        let n = labels.iter().filter(|&&l| l == class).count();
        if n < 2 {
            return Err(invalid(format!("label {class} has {n} samples, need at least 2")));
        }
    }
    let mut rng = rng_for(hyper.seed, 0);
    let mut bundle = CganBundle::init(features.cols(), hyper, &mut rng)?;
    bundle.scaler = FeatureScaler::fit(features, hyper.scaling)?;
    let data = bundle.scaler.transform(features)?;
    let codes = one_hot(labels);

    let mut gen = Trainee::new(bundle.generator.clone());
    let mut disc = Trainee::new(bundle.discriminator.clone());
    let mut history = TrainHistory::default();
    let fd = features.cols();

    for _ in 0..hyper.epochs {
        for idx in epoch_batches(data.rows(), hyper.batch_size, &mut rng) {
            let m = idx.len();
            let real = data.select_rows(&idx);
            let code = codes.select_rows(&idx);

            let z = normal_matrix(m, hyper.noise_dim, &mut rng);
            let fake = gen.net.predict(&z.hcat(&code)?)?;
            let d_loss = discriminator_step(&mut disc, &real.hcat(&code)?, &fake.hcat(&code)?, hyper)?;

            let z = normal_matrix(m, hyper.noise_dim, &mut rng);
            let g_acts = gen.net.forward(&z.hcat(&code)?)?;
            let (g_loss, dx) =
                fooling_gradient(&disc.net, &g_acts.output().hcat(&code)?, hyper.loss, true)?;
            let (g_grads, _) = gen.net.backward(&g_acts, &dx.col_range(0, fd))?;
            adam_step(&mut gen.net, &g_grads, &mut gen.opt, hyper)?;

            history.d_loss.push(d_loss);
            history.g_loss.push(g_loss);
        }
    }
    bundle.generator = gen.net;
    bundle.discriminator = disc.net;
    Ok((bundle, history))
}

/// `n` synthetic feature rows for `label`, in original feature units.
pub fn sample_cgan<R: Rng + ?Sized>(
    bundle: &CganBundle,
    label: u8,
    n: usize,
    rng: &mut R,
) -> Result<Matrix> {
    check_labels(&[label])?;
    if n == 0 {
        return Ok(Matrix::zeros(0, bundle.feature_dim));
    }
    let z = normal_matrix(n, bundle.hyper.noise_dim, rng);
    let code = one_hot(&vec![label; n]);
    let out = bundle.generator.predict(&z.hcat(&code)?)?;
    bundle.scaler.inverse(&out)
}

/// Fraction of a balanced real/fake batch the discriminator gets right
/// (`p > 0.5` on real rows, `p <= 0.5` on generated rows). Fakes reuse the
/// real rows' labels.
pub fn discriminator_accuracy<R: Rng + ?Sized>(
    bundle: &CganBundle,
    real: &Matrix,
    labels: &[u8],
    rng: &mut R,
) -> Result<f64> {
    if real.rows() != labels.len() || real.is_empty() {
        return Err(shape("need one label per real row and at least one row"));
    }
    check_labels(labels)?;
    let code = one_hot(labels);
    let z = normal_matrix(real.rows(), bundle.hyper.noise_dim, rng);
    let fake = bundle.generator.predict(&z.hcat(&code)?)?;
    let scaled = bundle.scaler.transform(real)?;
    let pr = bundle.discriminator.predict(&scaled.hcat(&code)?)?;
    let pf = bundle.discriminator.predict(&fake.hcat(&code)?)?;
    let hits = pr.as_slice().iter().filter(|&&p| p > 0.5).count()
        + pf.as_slice().iter().filter(|&&p| p <= 0.5).count();
    Ok(hits as f64 / (2 * real.rows()) as f64)
}
