use super::{
    discriminator_step, epoch_batches, fooling_gradient, normal_matrix, FeatureScaler, Trainee,
    TrainHistory,
};
use crate::error::{invalid, Result};
use crate::matrix::Matrix;
use crate::nncore::{adam_step, Activation, DenseNet, TrainHyper};
use crate::rng::{rng_for, SimRng};

/// Generator `z -> x`, encoder `x -> z` and a joint discriminator on
/// `[x, z]` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct BiganBundle {
    pub generator: DenseNet,
    pub encoder: DenseNet,
    pub discriminator: DenseNet,
    pub hyper: TrainHyper,
    pub feature_dim: usize,
    pub scaler: FeatureScaler,
}

impl BiganBundle {
    pub fn init(feature_dim: usize, hyper: &TrainHyper, rng: &mut SimRng) -> Result<Self> {
        hyper.validate()?;
        let act = hyper.hidden_activation();
        let nz = hyper.noise_dim;
        Ok(Self {
            generator: DenseNet::mlp(nz, &hyper.hidden, feature_dim, act, hyper.generator_activation(), rng),
            encoder: DenseNet::mlp(feature_dim, &hyper.hidden, nz, act, Activation::Identity, rng),
            discriminator: DenseNet::mlp(feature_dim + nz, &hyper.hidden, 1, act, Activation::Sigmoid, rng),
            hyper: hyper.clone(),
            feature_dim,
            scaler: FeatureScaler::identity(feature_dim),
        })
    }

    pub fn latent_dim(&self) -> usize {
        self.hyper.noise_dim
    }
}

/// Trains generator and encoder against the joint discriminator. Real pairs
/// are `[x, Enc(x)]`, fake pairs `[G(z), z]`. The generator is pushed to make
/// its pairs look real and the encoder to make its pairs look fake, both in
/// the non-saturating form unless `hyper.loss` says otherwise.
pub fn train_bigan(features: &Matrix, hyper: &TrainHyper) -> Result<(BiganBundle, TrainHistory)> {
    hyper.validate()?;
    if features.rows() < hyper.batch_size {
        return Err(invalid(format!(
            "{} samples is fewer than one batch of {}",
            features.rows(),
            hyper.batch_size
        )));
    }
    let mut rng = rng_for(hyper.seed, 0);
    let mut bundle = BiganBundle::init(features.cols(), hyper, &mut rng)?;
    bundle.scaler = FeatureScaler::fit(features, hyper.scaling)?;
    let data = bundle.scaler.transform(features)?;
    let fd = features.cols();
    let nz = hyper.noise_dim;

    let mut gen = Trainee::new(bundle.generator.clone());
    let mut enc = Trainee::new(bundle.encoder.clone());
    let mut disc = Trainee::new(bundle.discriminator.clone());
    let mut history = TrainHistory::default();

    for _ in 0..hyper.epochs {
        for idx in epoch_batches(data.rows(), hyper.batch_size, &mut rng) {
            let x = data.select_rows(&idx);
            let z = normal_matrix(idx.len(), nz, &mut rng);

            let e_acts = enc.net.forward(&x)?;
            let g_acts = gen.net.forward(&z)?;
            let real_pair = x.hcat(e_acts.output())?;
            let fake_pair = g_acts.output().hcat(&z)?;
            let d_loss = discriminator_step(&mut disc, &real_pair, &fake_pair, hyper)?;

            let (lg, dg) = fooling_gradient(&disc.net, &fake_pair, hyper.loss, true)?;
            let (g_grads, _) = gen.net.backward(&g_acts, &dg.col_range(0, fd))?;
            let (le, de) = fooling_gradient(&disc.net, &real_pair, hyper.loss, false)?;
            let (e_grads, _) = enc.net.backward(&e_acts, &de.col_range(fd, fd + nz))?;
            adam_step(&mut gen.net, &g_grads, &mut gen.opt, hyper)?;
            adam_step(&mut enc.net, &e_grads, &mut enc.opt, hyper)?;

            history.d_loss.push(d_loss);
            history.g_loss.push(lg + le);
        }
    }
    bundle.generator = gen.net;
    bundle.encoder = enc.net;
    bundle.discriminator = disc.net;
    Ok((bundle, history))
}

/// Latent codes `Enc(x)` for raw feature rows.
pub fn encode(bundle: &BiganBundle, features: &Matrix) -> Result<Matrix> {
    bundle.encoder.predict(&bundle.scaler.transform(features)?)
}

/// `G(Enc(x))` in raw feature units.
pub fn reconstruct(bundle: &BiganBundle, features: &Matrix) -> Result<Matrix> {
    let z = encode(bundle, features)?;
    bundle.scaler.inverse(&bundle.generator.predict(&z)?)
}
