//! Dense feed-forward networks with exact backpropagation.
//!
//! Batches are row-major matrices with one sample per row, so a layer maps
//! `x (B x in)` to `act(x W + b) (B x out)`.

mod adam;
pub mod checkpoint;
mod gradcheck;
mod loss;

pub use adam::{adam_step, AdamState};
pub use gradcheck::{gradcheck, gradcheck_suite, GradcheckReport};
pub use loss::{bce_d_loss, bce_g_loss, minimax_g_loss, GanLoss, PROB_CLAMP};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{shape, Result};
use crate::matrix::Matrix;

pub const LEAKY_ALPHA: f64 = 0.2;

pub fn leaky_relu(x: f64, alpha: f64) -> f64 {
    x.max(alpha * x)
}

/// Logistic function, stable for large `|x|`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    LeakyRelu(f64),
    Sigmoid,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::LeakyRelu(a) => leaky_relu(x, a),
            Activation::Sigmoid => sigmoid(x),
            Activation::Identity => x,
        }
    }

    /// Derivative given the pre-activation `z` and output `y = act(z)`.
    fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::LeakyRelu(a) => {
                if z > 0.0 {
                    1.0
                } else {
                    a
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `fan_in x fan_out`.
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub activation: Activation,
}

impl Dense {
    pub fn fan_in(&self) -> usize {
        self.weights.rows()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.cols()
    }

    pub fn zeros(fan_in: usize, fan_out: usize, activation: Activation) -> Self {
        Self { weights: Matrix::zeros(fan_in, fan_out), bias: vec![0.0; fan_out], activation }
    }

    /// Glorot-uniform weights, zero bias.
    pub fn glorot<R: Rng + ?Sized>(
        fan_in: usize,
        fan_out: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let w = (0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)).collect();
        Self {
            weights: Matrix::from_vec(fan_in, fan_out, w).expect("sized above"),
            bias: vec![0.0; fan_out],
            activation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseNet {
    pub layers: Vec<Dense>,
}

/// Everything a backward pass needs from the forward pass.
#[derive(Debug, Clone)]
pub struct Activations {
    /// `outputs[0]` is the input batch, `outputs[l + 1]` the output of layer `l`.
    pub outputs: Vec<Matrix>,
    /// Pre-activation values per layer.
    pub pre: Vec<Matrix>,
}

impl Activations {
    pub fn output(&self) -> &Matrix {
        self.outputs.last().expect("always holds the input")
    }
}

/// Gradients with the same layout as the network parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Matrix>,
    pub bias: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &DenseNet) -> Self {
        Self {
            weights: net.layers.iter().map(|l| Matrix::zeros(l.fan_in(), l.fan_out())).collect(),
            bias: net.layers.iter().map(|l| vec![0.0; l.fan_out()]).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights
            .iter()
            .zip(&self.bias)
            .flat_map(|(w, b)| w.as_slice().iter().chain(b.iter()).copied())
    }

    /// Adds `other` into `self`.
    pub fn accumulate(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            a.as_mut_slice().iter_mut().zip(b.as_slice()).for_each(|(x, y)| *x += y);
        }
        for (a, b) in self.bias.iter_mut().zip(&other.bias) {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
}

impl DenseNet {
    /// Builds `input -> hidden... -> output` with Glorot-uniform init.
    pub fn mlp<R: Rng + ?Sized>(
        input_dim: usize,
        hidden: &[usize],
        output_dim: usize,
        hidden_act: Activation,
        output_act: Activation,
        rng: &mut R,
    ) -> Self {
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut fan_in = input_dim;
        for &h in hidden {
            layers.push(Dense::glorot(fan_in, h, hidden_act, rng));
            fan_in = h;
        }
        layers.push(Dense::glorot(fan_in, output_dim, output_act, rng));
        Self { layers }
    }

    pub fn new(layers: Vec<Dense>) -> Result<Self> {
        if layers.is_empty() {
            return Err(shape("network needs at least one layer"));
        }
        for (i, w) in layers.windows(2).enumerate() {
            if w[0].fan_out() != w[1].fan_in() {
                return Err(shape(format!(
                    "layer {i} outputs {} values but layer {} expects {}",
                    w[0].fan_out(),
                    i + 1,
                    w[1].fan_in()
                )));
            }
        }
        if let Some((i, l)) = layers.iter().enumerate().find(|(_, l)| l.bias.len() != l.fan_out()) {
            return Err(shape(format!("layer {i} bias has {} entries, expected {}", l.bias.len(), l.fan_out())));
        }
        Ok(Self { layers })
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, Dense::fan_in)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, Dense::fan_out)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.as_slice().len() + l.bias.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.layers.iter().all(|l| l.weights.all_finite() && l.bias.iter().all(|b| b.is_finite()))
    }

    /// Flat view of every parameter, weights before bias per layer.
    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| l.weights.as_slice().iter().chain(l.bias.iter()).copied())
            .collect()
    }

    pub(crate) fn param_mut(&mut self, mut idx: usize) -> &mut f64 {
        for l in &mut self.layers {
            let nw = l.weights.as_slice().len();
            if idx < nw {
                return &mut l.weights.as_mut_slice()[idx];
            }
            idx -= nw;
            if idx < l.bias.len() {
                return &mut l.bias[idx];
            }
            idx -= l.bias.len();
        }
        panic!("parameter index out of range");
    }

    pub fn forward(&self, batch: &Matrix) -> Result<Activations> {
        if batch.cols() != self.input_dim() {
            return Err(shape(format!(
                "batch has {} features, network expects {}",
                batch.cols(),
                self.input_dim()
            )));
        }
        let mut outputs = Vec::with_capacity(self.layers.len() + 1);
        let mut pre = Vec::with_capacity(self.layers.len());
        outputs.push(batch.clone());
        for layer in &self.layers {
            let mut z = outputs.last().unwrap().matmul(&layer.weights)?;
            for r in 0..z.rows() {
                z.row_mut(r).iter_mut().zip(&layer.bias).for_each(|(v, b)| *v += b);
            }
            outputs.push(z.map(|v| layer.activation.apply(v)));
            pre.push(z);
        }
        Ok(Activations { outputs, pre })
    }

    /// Output only.
    pub fn predict(&self, batch: &Matrix) -> Result<Matrix> {
        Ok(self.forward(batch)?.outputs.pop().expect("nonempty"))
    }

    /// Backpropagates `loss_grad = dL/d(output)` and returns the parameter
    /// gradients together with `dL/d(input)`.
    pub fn backward(&self, acts: &Activations, loss_grad: &Matrix) -> Result<(Gradients, Matrix)> {
        if acts.pre.len() != self.layers.len() {
            return Err(shape("activations come from a different network"));
        }
        let out = acts.output();
        if loss_grad.rows() != out.rows() || loss_grad.cols() != out.cols() {
            return Err(shape(format!(
                "loss gradient is {}x{}, output is {}x{}",
                loss_grad.rows(),
                loss_grad.cols(),
                out.rows(),
                out.cols()
            )));
        }
        let mut grads = Gradients::zeros_like(self);
        let mut delta = loss_grad.clone();
        for (l, layer) in self.layers.iter().enumerate().rev() {
            let z = &acts.pre[l];
            let y = &acts.outputs[l + 1];
            delta
                .as_mut_slice()
                .iter_mut()
                .zip(z.as_slice().iter().zip(y.as_slice()))
                .for_each(|(d, (&zv, &yv))| *d *= layer.activation.derivative(zv, yv));
            grads.weights[l] = acts.outputs[l].t_matmul(&delta)?;
            let gb = &mut grads.bias[l];
            for r in delta.iter_rows() {
                gb.iter_mut().zip(r).for_each(|(g, v)| *g += v);
            }
            delta = delta.matmul_t(&layer.weights)?;
        }
        Ok((grads, delta))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputActivation {
    #[default]
    Linear,
    Sigmoid,
}

/// Optimiser and architecture settings shared by all GAN trainers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainHyper {
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub noise_dim: usize,
    pub hidden: Vec<usize>,
    pub leaky_alpha: f64,
    pub loss: GanLoss,
    /// Normalisation applied to real samples before training.
    pub scaling: crate::scaler::Scaling,
    /// Output layer of generators (and the BiGAN encoder's inverse, the
    /// BiGAN generator). Sigmoid suits `MinMax` scaling.
    pub generator_output: OutputActivation,
    pub seed: u64,
}

impl Default for TrainHyper {
    fn default() -> Self {
        Self {
            learning_rate: 2e-4,
            adam_beta1: 0.5,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            batch_size: 32,
            epochs: 2000,
            noise_dim: 32,
            hidden: vec![100, 100, 100],
            leaky_alpha: LEAKY_ALPHA,
            loss: GanLoss::NonSaturating,
            scaling: crate::scaler::Scaling::Global,
            generator_output: OutputActivation::Linear,
            seed: 0,
        }
    }
}

impl TrainHyper {
    pub fn validate(&self) -> Result<()> {
        use crate::error::invalid;
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(invalid("learning_rate must be positive"));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(invalid("adam betas must lie in [0, 1)"));
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return Err(invalid("adam_epsilon must be positive"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size must be at least 1"));
        }
        if self.noise_dim == 0 {
            return Err(invalid("noise_dim must be at least 1"));
        }
        if self.hidden.contains(&0) {
            return Err(invalid("hidden widths must be positive"));
        }
        Ok(())
    }

    pub fn hidden_activation(&self) -> Activation {
        Activation::LeakyRelu(self.leaky_alpha)
    }

    pub fn generator_activation(&self) -> Activation {
        match self.generator_output {
            OutputActivation::Linear => Activation::Identity,
            OutputActivation::Sigmoid => Activation::Sigmoid,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn activations() {
        assert_eq!(leaky_relu(2.0, LEAKY_ALPHA), 2.0);
        assert!((leaky_relu(-1.0, LEAKY_ALPHA) + 0.2).abs() < 1e-15);
        assert_eq!(leaky_relu(0.0, LEAKY_ALPHA), 0.0);
        assert_eq!(sigmoid(0.0), 0.5);
        assert_eq!(sigmoid(1e3), 1.0);
        assert_eq!(sigmoid(-1e3), 0.0);
        assert!(sigmoid(f64::INFINITY) == 1.0);
        for x in [0.3, 1.7, 12.0, 40.0] {
            assert!((sigmoid(-x) - (1.0 - sigmoid(x))).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_net_gives_half() {
        let net = DenseNet::new(vec![
            Dense::zeros(3, 4, Activation::LeakyRelu(0.2)),
            Dense::zeros(4, 1, Activation::Sigmoid),
        ])
        .unwrap();
        let x = Matrix::from_vec(2, 3, vec![1.0, -2.0, 3.0, 0.5, 0.1, -9.0]).unwrap();
        let y = net.predict(&x).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn identity_layer_passthrough() {
        let mut w = Matrix::zeros(3, 3);
        for i in 0..3 {
            w.set(i, i, 1.0);
        }
        let net =
            DenseNet::new(vec![Dense { weights: w, bias: vec![0.0; 3], activation: Activation::Identity }])
                .unwrap();
        let x = Matrix::from_vec(2, 3, vec![1.0, -2.0, 3.0, 0.5, 0.1, -9.0]).unwrap();
        assert_eq!(net.predict(&x).unwrap(), x);
    }

    #[test]
    fn layer_chain_validated() {
        let r = DenseNet::new(vec![
            Dense::zeros(3, 4, Activation::Identity),
            Dense::zeros(5, 1, Activation::Identity),
        ]);
        assert!(r.is_err());
        assert!(DenseNet::new(vec![]).is_err());
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let mut rng = rng_from_seed(0);
        let net = DenseNet::mlp(4, &[3], 1, Activation::LeakyRelu(0.2), Activation::Sigmoid, &mut rng);
        assert!(net.forward(&Matrix::zeros(2, 5)).is_err());
        let acts = net.forward(&Matrix::zeros(2, 4)).unwrap();
        assert!(net.backward(&acts, &Matrix::zeros(3, 1)).is_err());
    }

    #[test]
    fn zero_loss_grad_gives_zero_grads() {
        let mut rng = rng_from_seed(1);
        let net = DenseNet::mlp(4, &[6, 5], 2, Activation::LeakyRelu(0.2), Activation::Sigmoid, &mut rng);
        let x = Matrix::from_vec(3, 4, (0..12).map(|v| v as f64 * 0.1).collect()).unwrap();
        let acts = net.forward(&x).unwrap();
        let (g, dx) = net.backward(&acts, &Matrix::zeros(3, 2)).unwrap();
        assert!(g.iter().all(|v| v == 0.0));
        assert!(dx.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn glorot_bounds() {
        let mut rng = rng_from_seed(2);
        let d = Dense::glorot(10, 20, Activation::Identity, &mut rng);
        let lim = (6.0f64 / 30.0).sqrt();
        assert!(d.weights.as_slice().iter().all(|w| w.abs() <= lim));
        assert!(d.bias.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn hyper_validation() {
        TrainHyper::default().validate().unwrap();
        assert!(TrainHyper { learning_rate: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainHyper { adam_beta1: 1.0, ..Default::default() }.validate().is_err());
        assert!(TrainHyper { batch_size: 0, ..Default::default() }.validate().is_err());
        assert!(TrainHyper { noise_dim: 0, ..Default::default() }.validate().is_err());
    }
}
