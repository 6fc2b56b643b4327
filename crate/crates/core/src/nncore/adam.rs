use super::{DenseNet, Gradients, TrainHyper};
use crate::error::{shape, Result};

/// First and second moment estimates plus the step counter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(net: &DenseNet) -> Self {
        let n = net.param_count();
        Self { m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(
    net: &mut DenseNet,
    grads: &Gradients,
    state: &mut AdamState,
    hyper: &TrainHyper,
) -> Result<()> {
    let n = net.param_count();
    if state.m.len() != n {
        return Err(shape(format!("optimizer state has {} slots, network {n}", state.m.len())));
    }
    if grads.weights.len() != net.layers.len()
        || grads.weights.iter().zip(&net.layers).any(|(g, l)| {
            g.rows() != l.weights.rows() || g.cols() != l.weights.cols()
        })
        || grads.bias.iter().zip(&net.layers).any(|(g, l)| g.len() != l.bias.len())
    {
        return Err(shape("gradients do not match network layout"));
    }
    state.t += 1;
    let (b1, b2) = (hyper.adam_beta1, hyper.adam_beta2);
    let c1 = 1.0 - b1.powi(state.t as i32);
    let c2 = 1.0 - b2.powi(state.t as i32);
    let lr = hyper.learning_rate;
    let eps = hyper.adam_epsilon;

    let mut k = 0;
    let mut update = |p: &mut f64, g: f64| {
        let m = &mut state.m[k];
        let v = &mut state.v[k];
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        *p -= lr * (*m / c1) / ((*v / c2).sqrt() + eps);
        k += 1;
    };
    for ((layer, gw), gb) in net.layers.iter_mut().zip(&grads.weights).zip(&grads.bias) {
        for (p, &g) in layer.weights.as_mut_slice().iter_mut().zip(gw.as_slice()) {
            update(p, g);
        }
        for (p, &g) in layer.bias.iter_mut().zip(gb) {
            update(p, g);
        }
    }
    Ok(())
}
