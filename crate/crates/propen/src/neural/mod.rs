//! Dense feed-forward networks with exact backpropagation.
//!
//! This is the function approximator behind both the implicit-guidance
//! encoder-decoder and the explicit baseline. Scalars are `f64`, weights are
//! row-major `(out_dim, in_dim)`, and the reconstruction loss is a mean
//! squared error with an optional mix term
//! `MSE(f(x), target) + beta * MSE(f(x), mix_target)`.

mod serialize;

use ndarray::{Array1, Array2, ArrayView1};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Elementwise activation applied after the affine map of a layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    #[inline]
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// One affine layer followed by an activation.
#[derive(Debug, Clone)]
pub struct DenseLayer {
    pub weights: Array2<f64>,
    pub biases: Array1<f64>,
    pub activation: Activation,
}

impl DenseLayer {
    pub fn new(weights: Array2<f64>, biases: Array1<f64>, activation: Activation) -> Result<Self> {
        if weights.nrows() != biases.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.nrows(),
                actual: biases.len(),
            });
        }
        if weights.iter().chain(biases.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("layer parameters".into()));
        }
        Ok(Self { weights, biases, activation })
    }

    /// Glorot-style uniform initialization in `[-a, a]`, `a = sqrt(6/(fan_in+fan_out))`.
    pub fn glorot(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut ChaCha8Rng) -> Self {
        let a = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weights = Array2::from_shape_fn((out_dim, in_dim), |_| rng.random_range(-a..=a));
        let biases = Array1::zeros(out_dim);
        Self { weights, biases, activation }
    }

    pub fn in_dim(&self) -> usize {
        self.weights.ncols()
    }

    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }
}

/// Multi-layer perceptron; adjacent layer dimensions chain.
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<DenseLayer>,
}

impl Mlp {
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidConfig("model must have at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::DimensionMismatch {
                    expected: pair[0].out_dim(),
                    actual: pair[1].in_dim(),
                });
            }
        }
        Ok(Self { layers })
    }

    /// Builds a ReLU network with the given layer sizes (`dims[0]` inputs,
    /// `dims.last()` outputs, Identity on the output layer), seeded init.
    pub fn seeded(dims: &[usize], seed: u64) -> Result<Self> {
        if dims.len() < 2 || dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidConfig(format!("bad layer sizes {dims:?}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = dims.len() - 1;
        let layers = (0..n)
            .map(|k| {
                let act = if k + 1 == n { Activation::Identity } else { Activation::Relu };
                DenseLayer::glorot(dims[k], dims[k + 1], act, &mut rng)
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().out_dim()
    }

    pub fn forward(&self, input: ArrayView1<f64>) -> Result<Array1<f64>> {
        if input.len() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim(),
                actual: input.len(),
            });
        }
        let mut a = input.to_owned();
        for layer in &self.layers {
            let mut z = layer.weights.dot(&a) + &layer.biases;
            z.mapv_inplace(|v| layer.activation.apply(v));
            a = z;
        }
        Ok(a)
    }

    /// Forward pass keeping per-layer pre-activations and activations.
    fn forward_trace(&self, input: ArrayView1<f64>) -> (Vec<Array1<f64>>, Vec<Array1<f64>>) {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        let mut pre = Vec::with_capacity(self.layers.len());
        activations.push(input.to_owned());
        for layer in &self.layers {
            let z = layer.weights.dot(activations.last().unwrap()) + &layer.biases;
            let a = z.mapv(|v| layer.activation.apply(v));
            pre.push(z);
            activations.push(a);
        }
        (activations, pre)
    }

    /// Backpropagates `grad_output` (dL/dy) through the network.
    /// Returns per-parameter gradients and the gradient w.r.t. the input.
    pub fn backward(&self, input: ArrayView1<f64>, grad_output: ArrayView1<f64>) -> Result<(Gradients, Array1<f64>)> {
        if grad_output.len() != self.output_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.output_dim(),
                actual: grad_output.len(),
            });
        }
        let (activations, pre) = self.forward_trace(input);
        let mut grads = Gradients::zeros_like(self);
        let mut delta = grad_output.to_owned();
        for (k, layer) in self.layers.iter().enumerate().rev() {
            for (d, z) in delta.iter_mut().zip(pre[k].iter()) {
                *d *= layer.activation.derivative(*z);
            }
            let a_prev = &activations[k];
            for (mut row, d) in grads.weights[k].rows_mut().into_iter().zip(delta.iter()) {
                row.assign(&(a_prev * *d));
            }
            grads.biases[k].assign(&delta);
            delta = layer.weights.t().dot(&delta);
        }
        Ok((grads, delta))
    }

    /// Loss and exact gradients of
    /// `MSE(f(x), target) + mix_beta * MSE(f(x), mix_target)`.
    pub fn loss_and_gradients(
        &self,
        input: ArrayView1<f64>,
        target: ArrayView1<f64>,
        mix_target: Option<ArrayView1<f64>>,
        mix_beta: f64,
    ) -> Result<(f64, Gradients)> {
        let out_dim = self.output_dim();
        if target.len() != out_dim {
            return Err(Error::DimensionMismatch { expected: out_dim, actual: target.len() });
        }
        if mix_beta > 0.0 && mix_target.is_none() {
            return Err(Error::MissingMixTarget);
        }
        if let Some(mix) = mix_target {
            if mix.len() != out_dim {
                return Err(Error::DimensionMismatch { expected: out_dim, actual: mix.len() });
            }
        }
        let y = self.forward(input)?;
        let k = out_dim as f64;
        let err = &y - &target;
        let mut loss = err.iter().map(|e| e * e).sum::<f64>() / k;
        let mut grad_out = err.mapv(|e| 2.0 * e / k);
        if mix_beta > 0.0 {
            let mix_err = &y - &mix_target.unwrap();
            loss += mix_beta * mix_err.iter().map(|e| e * e).sum::<f64>() / k;
            grad_out += &mix_err.mapv(|e| 2.0 * mix_beta * e / k);
        }
        let (grads, _) = self.backward(input, grad_out.view())?;
        Ok((loss, grads))
    }
}

/// Per-parameter gradients mirroring an [`Mlp`]'s layer shapes.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub weights: Vec<Array2<f64>>,
    pub biases: Vec<Array1<f64>>,
}

impl Gradients {
    pub fn zeros_like(model: &Mlp) -> Self {
        Self {
            weights: model.layers.iter().map(|l| Array2::zeros(l.weights.dim())).collect(),
            biases: model.layers.iter().map(|l| Array1::zeros(l.biases.len())).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            *a += b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            *w *= factor;
        }
        for b in &mut self.biases {
            *b *= factor;
        }
    }
}

/// Training hyperparameters. Shuffling and initialization both derive from
/// `rng_seed`, so training is bit-deterministic.
#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub rng_seed: u64,
    pub mix_beta: f64,
}

impl TrainConfig {
    pub fn new(epochs: usize, batch_size: usize, learning_rate: f64, rng_seed: u64, mix_beta: f64) -> Result<Self> {
        if epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".into()));
        }
        if !(learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if !(mix_beta >= 0.0) {
            return Err(Error::InvalidConfig("mix_beta must be >= 0".into()));
        }
        Ok(Self { epochs, batch_size, learning_rate, rng_seed, mix_beta })
    }
}

/// Adam optimizer state (beta1=0.9, beta2=0.999, eps=1e-8).
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Gradients,
    v: Gradients,
}

impl Adam {
    pub fn new(model: &Mlp, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            t: 0,
            m: Gradients::zeros_like(model),
            v: Gradients::zeros_like(model),
        }
    }

    pub fn step(&mut self, model: &mut Mlp, grads: &Gradients) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for k in 0..model.layers.len() {
            for ((p, g), (m, v)) in model.layers[k]
                .weights
                .iter_mut()
                .zip(grads.weights[k].iter())
                .zip(self.m.weights[k].iter_mut().zip(self.v.weights[k].iter_mut()))
            {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= self.lr * (*m / bc1) / ((*v / bc2).sqrt() + self.eps);
            }
            for ((p, g), (m, v)) in model.layers[k]
                .biases
                .iter_mut()
                .zip(grads.biases[k].iter())
                .zip(self.m.biases[k].iter_mut().zip(self.v.biases[k].iter_mut()))
            {
                *m = self.beta1 * *m + (1.0 - self.beta1) * g;
                *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
                *p -= self.lr * (*m / bc1) / ((*v / bc2).sqrt() + self.eps);
            }
        }
    }
}

/// One training sample: input, reconstruction target, optional mix target.
#[derive(Debug, Clone)]
pub struct TrainPair {
    pub input: Array1<f64>,
    pub target: Array1<f64>,
    pub mix_target: Option<Array1<f64>>,
}

/// Trains `model` in place with Adam on shuffled mini-batches.
/// Returns the per-epoch mean loss history.
pub fn train(model: &mut Mlp, pairs: &[TrainPair], config: &TrainConfig) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    for p in pairs {
        if p.input.len() != model.input_dim() {
            return Err(Error::DimensionMismatch { expected: model.input_dim(), actual: p.input.len() });
        }
        if p.target.len() != model.output_dim() {
            return Err(Error::DimensionMismatch { expected: model.output_dim(), actual: p.target.len() });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut adam = Adam::new(model, config.learning_rate);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut batch_grads = Gradients::zeros_like(model);
            let mut batch_loss = 0.0;
            for &i in batch {
                let p = &pairs[i];
                let (loss, grads) = model.loss_and_gradients(
                    p.input.view(),
                    p.target.view(),
                    p.mix_target.as_ref().map(|m| m.view()),
                    config.mix_beta,
                )?;
                batch_loss += loss;
                batch_grads.add_assign(&grads);
            }
            batch_grads.scale(1.0 / batch.len() as f64);
            adam.step(model, &batch_grads);
            epoch_loss += batch_loss;
        }
        let mean_loss = epoch_loss / pairs.len() as f64;
        if !mean_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss: mean_loss });
        }
        history.push(mean_loss);
    }
    Ok(history)
}
