use super::{
    check_labels, discriminator_step, epoch_batches, fooling_gradient, one_hot, FeatureScaler,
    Trainee, TrainHistory, LABEL_DIM,
};
use crate::error::{invalid, shape, Result};
use crate::matrix::Matrix;
use crate::nncore::{adam_step, Activation, Dense, DenseNet, TrainHyper};
use crate::rng::rng_for;

/// Generator `(latent, onehot) -> x` trained against an unconditional
/// discriminator on new-environment samples.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationBundle {
    pub generator: DenseNet,
    pub discriminator: DenseNet,
    pub hyper: TrainHyper,
    pub latent_dim: usize,
    pub feature_dim: usize,
    /// Fitted on the new-environment samples; generator outputs live in its
    /// scaled space.
    pub scaler: FeatureScaler,
}

/// Widens a `latent -> x` generator to take `(latent, onehot)`; the label
/// inputs start with zero weight.
fn widen_generator(base: &DenseNet) -> Result<DenseNet> {
    let mut layers = base.layers.clone();
    let first = &layers[0];
    let (fan_in, fan_out) = (first.fan_in(), first.fan_out());
    let mut w = Matrix::zeros(fan_in + LABEL_DIM, fan_out);
    for r in 0..fan_in {
        w.row_mut(r).copy_from_slice(first.weights.row(r));
    }
    layers[0] = Dense { weights: w, bias: first.bias.clone(), activation: first.activation };
    DenseNet::new(layers)
}

/// Trains the adaptation CGAN. Latents and labels from the old environment
/// replace the noise input; the discriminator only sees unlabeled
/// new-environment rows, so labels condition the generator alone. Latents
/// are taken as given (the encoder is not tuned here).
///
/// With `warm_start`, the generator starts from a `latent -> x` network such
/// as the BiGAN generator, which must have `latent_dim` inputs and the
/// feature width as output.
pub fn train_adaptation_cgan(
    e2_features: &Matrix,
    e1_latents: &Matrix,
    e1_labels: &[u8],
    hyper: &TrainHyper,
    warm_start: Option<&DenseNet>,
) -> Result<(AdaptationBundle, TrainHistory)> {
    hyper.validate()?;
    if e1_latents.rows() != e1_labels.len() {
        return Err(shape(format!(
            "{} latent rows but {} labels",
            e1_latents.rows(),
            e1_labels.len()
        )));
    }
    check_labels(e1_labels)?;
    if e1_latents.is_empty() || e2_features.is_empty() {
        return Err(invalid("adaptation needs old-environment latents and new-environment samples"));
    }
    let fd = e2_features.cols();
    let nl = e1_latents.cols();
    let mut rng = rng_for(hyper.seed, 0);
    let act = hyper.hidden_activation();

    let generator = match warm_start {
        Some(base) => {
            if base.input_dim() != nl || base.output_dim() != fd {
                return Err(shape(format!(
                    "warm-start generator maps {} -> {}, need {nl} -> {fd}",
                    base.input_dim(),
                    base.output_dim()
                )));
            }
            widen_generator(base)?
        }
        None => DenseNet::mlp(nl + LABEL_DIM, &hyper.hidden, fd, act, hyper.generator_activation(), &mut rng),
    };
    let discriminator = DenseNet::mlp(fd, &hyper.hidden, 1, act, Activation::Sigmoid, &mut rng);
    let scaler = FeatureScaler::fit(e2_features, hyper.scaling)?;
    let reals = scaler.transform(e2_features)?;
    let inputs = e1_latents.hcat(&one_hot(e1_labels))?;

    let mut gen = Trainee::new(generator);
    let mut disc = Trainee::new(discriminator);
    let mut history = TrainHistory::default();
    let mut real_order = Vec::new();

    for _ in 0..hyper.epochs {
        for idx in epoch_batches(inputs.rows(), hyper.batch_size, &mut rng) {
            let m = idx.len();
            if real_order.len() < m {
                // refill with a fresh shuffle of the new-environment rows
                let mut next: Vec<usize> = epoch_batches(reals.rows(), reals.rows(), &mut rng).concat();
                while next.len() < m {
                    next.extend(epoch_batches(reals.rows(), reals.rows(), &mut rng).concat());
                }
                real_order.extend(next);
            }
            let real_idx: Vec<usize> = real_order.drain(..m).collect();
            let real = reals.select_rows(&real_idx);
            let g_in = inputs.select_rows(&idx);

            let g_acts = gen.net.forward(&g_in)?;
            let d_loss = discriminator_step(&mut disc, &real, g_acts.output(), hyper)?;
            let (g_loss, dx) = fooling_gradient(&disc.net, g_acts.output(), hyper.loss, true)?;
            let (g_grads, _) = gen.net.backward(&g_acts, &dx)?;
            adam_step(&mut gen.net, &g_grads, &mut gen.opt, hyper)?;

            history.d_loss.push(d_loss);
            history.g_loss.push(g_loss);
        }
    }
    Ok((
        AdaptationBundle {
            generator: gen.net,
            discriminator: disc.net,
            hyper: hyper.clone(),
            latent_dim: nl,
            feature_dim: fd,
            scaler,
        },
        history,
    ))
}

/// `G(latent, label)` for each row, in new-environment feature units. The
/// output carries the given labels.
pub fn generate_adapted(bundle: &AdaptationBundle, latents: &Matrix, labels: &[u8]) -> Result<Matrix> {
    if latents.rows() != labels.len() {
        return Err(shape(format!("{} latent rows but {} labels", latents.rows(), labels.len())));
    }
    if latents.cols() != bundle.latent_dim {
        return Err(shape(format!("latents have {} columns, expected {}", latents.cols(), bundle.latent_dim)));
    }
    check_labels(labels)?;
    if latents.is_empty() {
        return Ok(Matrix::zeros(0, bundle.feature_dim));
    }
    let out = bundle.generator.predict(&latents.hcat(&one_hot(labels))?)?;
    bundle.scaler.inverse(&out)
}
