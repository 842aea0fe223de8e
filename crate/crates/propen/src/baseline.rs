//! Explicit-guidance baseline: an encoder-decoder of the same shape as the
//! implicit model, plus a latent-space property discriminator. Optimization
//! runs gradient ascent on the discriminator in latent space and decodes each
//! latent back to a design.

use ndarray::{Array1, ArrayView1};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::enhance::{ArchSpec, PropertyOracle, Trajectory};
use crate::error::{Error, Result};
use crate::matching::DesignSet;
use crate::neural::{Adam, Gradients, Mlp, TrainConfig};
use crate::scaling::Standardizer;

/// Encoder, decoder, and a latent-to-property discriminator, with the
/// standardizers used at training time.
#[derive(Debug, Clone)]
pub struct ExplicitGuidanceModel {
    encoder: Mlp,
    decoder: Mlp,
    discriminator: Mlp,
    design_scaler: Standardizer,
    property_scaler: Standardizer,
}

impl ExplicitGuidanceModel {
    pub fn from_parts(
        encoder: Mlp,
        decoder: Mlp,
        discriminator: Mlp,
        design_scaler: Standardizer,
        property_scaler: Standardizer,
    ) -> Result<Self> {
        let latent = encoder.output_dim();
        if decoder.input_dim() != latent || discriminator.input_dim() != latent {
            return Err(Error::DimensionMismatch { expected: latent, actual: decoder.input_dim() });
        }
        if discriminator.output_dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, actual: discriminator.output_dim() });
        }
        let m = design_scaler.dim();
        if encoder.input_dim() != m || decoder.output_dim() != m {
            return Err(Error::DimensionMismatch { expected: m, actual: encoder.input_dim() });
        }
        Ok(Self { encoder, decoder, discriminator, design_scaler, property_scaler })
    }

    pub fn latent_dim(&self) -> usize {
        self.encoder.output_dim()
    }

    pub fn design_dim(&self) -> usize {
        self.design_scaler.dim()
    }

    pub fn encoder(&self) -> &Mlp {
        &self.encoder
    }

    pub fn decoder(&self) -> &Mlp {
        &self.decoder
    }

    pub fn discriminator(&self) -> &Mlp {
        &self.discriminator
    }

    pub fn encode(&self, design: ArrayView1<f64>) -> Result<Array1<f64>> {
        let scaled = self.design_scaler.transform(design)?;
        self.encoder.forward(scaled.view())
    }

    /// Decodes a latent back to raw design coordinates.
    pub fn decode(&self, latent: ArrayView1<f64>) -> Result<Array1<f64>> {
        let scaled = self.decoder.forward(latent)?;
        self.design_scaler.inverse(scaled.view())
    }

    /// Discriminator output in raw property units.
    pub fn predict_property(&self, latent: ArrayView1<f64>) -> Result<f64> {
        let out = self.discriminator.forward(latent)?;
        Ok(self.property_scaler.inverse_scalar(out[0]))
    }

    /// Exact gradient of the (standardized) discriminator output w.r.t. the
    /// latent, by backpropagation.
    pub fn latent_gradient(&self, latent: ArrayView1<f64>) -> Result<Array1<f64>> {
        let ones = Array1::ones(1);
        let (_, input_grad) = self.discriminator.backward(latent, ones.view())?;
        Ok(input_grad)
    }
}

/// Latent gradient-ascent controls.
#[derive(Debug, Clone, Copy)]
pub struct GuidanceConfig {
    pub step_size: f64,
    pub n_steps: usize,
}

impl GuidanceConfig {
    pub fn new(step_size: f64, n_steps: usize) -> Result<Self> {
        if !(step_size >= 0.0) {
            return Err(Error::InvalidConfig("step_size must be >= 0".into()));
        }
        Ok(Self { step_size, n_steps })
    }
}

impl Default for GuidanceConfig {
    fn default() -> Self {
        Self { step_size: 0.01, n_steps: 30 }
    }
}

/// Jointly trains encoder, decoder, and discriminator by minimizing
/// reconstruction MSE + property-prediction MSE (1:1 weighting) with Adam.
/// Deterministic per `config.rng_seed`.
pub fn train_explicit(
    data: &DesignSet,
    arch: &ArchSpec,
    config: &TrainConfig,
) -> Result<ExplicitGuidanceModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let props = data.properties()?;
    let design_scaler = Standardizer::fit(data.designs())?;
    let property_scaler = Standardizer::fit_scalar(props)?;
    let m = data.dim();
    let mut encoder = Mlp::seeded(&arch.encoder_dims(m), config.rng_seed)?;
    let mut decoder = Mlp::seeded(&arch.decoder_dims(m), config.rng_seed.wrapping_add(1))?;
    let disc_dims = [arch.latent, arch.latent, 1];
    let mut discriminator = Mlp::seeded(&disc_dims, config.rng_seed.wrapping_add(2))?;

    let inputs: Vec<Array1<f64>> = (0..data.len())
        .map(|i| design_scaler.transform(data.design(i)))
        .collect::<Result<_>>()?;
    let targets_y: Vec<f64> = props.iter().map(|&y| property_scaler.transform_scalar(y)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut adam_enc = Adam::new(&encoder, config.learning_rate);
    let mut adam_dec = Adam::new(&decoder, config.learning_rate);
    let mut adam_disc = Adam::new(&discriminator, config.learning_rate);
    let mut order: Vec<usize> = (0..inputs.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut g_enc = Gradients::zeros_like(&encoder);
            let mut g_dec = Gradients::zeros_like(&decoder);
            let mut g_disc = Gradients::zeros_like(&discriminator);
            for &i in batch {
                let x = &inputs[i];
                let z = encoder.forward(x.view())?;
                let recon = decoder.forward(z.view())?;
                let pred = discriminator.forward(z.view())?;
                let err_r = &recon - x;
                let err_p = pred[0] - targets_y[i];
                epoch_loss += err_r.iter().map(|e| e * e).sum::<f64>() / m as f64 + err_p * err_p;
                let grad_recon = err_r.mapv(|e| 2.0 * e / m as f64);
                let grad_pred = Array1::from_vec(vec![2.0 * err_p]);
                let (dg, dz_recon) = decoder.backward(z.view(), grad_recon.view())?;
                let (cg, dz_pred) = discriminator.backward(z.view(), grad_pred.view())?;
                let (eg, _) = encoder.backward(x.view(), (&dz_recon + &dz_pred).view())?;
                g_dec.add_assign(&dg);
                g_disc.add_assign(&cg);
                g_enc.add_assign(&eg);
            }
            let scale = 1.0 / batch.len() as f64;
            g_enc.scale(scale);
            g_dec.scale(scale);
            g_disc.scale(scale);
            adam_enc.step(&mut encoder, &g_enc);
            adam_dec.step(&mut decoder, &g_dec);
            adam_disc.step(&mut discriminator, &g_disc);
        }
        let mean_loss = epoch_loss / inputs.len() as f64;
        if !mean_loss.is_finite() {
            return Err(Error::NonFiniteLoss { epoch, loss: mean_loss });
        }
    }
    ExplicitGuidanceModel::from_parts(encoder, decoder, discriminator, design_scaler, property_scaler)
}

/// Gradient-ascends the discriminator in latent space from the seed's
/// encoding and decodes every latent. `states[0]` is the step-0
/// reconstruction `decode(encode(seed))`, not the raw seed.
pub fn guide(
    model: &ExplicitGuidanceModel,
    seed: ArrayView1<f64>,
    config: &GuidanceConfig,
    oracle: Option<PropertyOracle>,
) -> Result<Trajectory> {
    let mut z = model.encode(seed)?;
    let mut states = vec![model.decode(z.view())?];
    for step in 1..=config.n_steps {
        let grad = model.latent_gradient(z.view())?;
        z = &z + &grad.mapv(|g| config.step_size * g);
        if z.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step, partial: states });
        }
        states.push(model.decode(z.view())?);
    }
    let property_values = match oracle {
        Some(g) => {
            let mut values = Vec::with_capacity(states.len());
            for s in &states {
                values.push(g(s.view())?);
            }
            Some(values)
        }
        None => None,
    };
    Ok(Trajectory { states, property_values, converged: false, steps_taken: config.n_steps })
}
