//! 2-d multi-modal toy distributions: pinwheel and 8-Gaussians.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matching::DesignSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyFamily {
    Pinwheel,
    EightGaussians,
}

#[derive(Debug, Clone)]
pub struct ToyConfig {
    pub family: ToyFamily,
    pub n_samples: usize,
    pub noise_scale: f64,
    pub rng_seed: u64,
}

impl ToyConfig {
    pub fn new(family: ToyFamily, n_samples: usize, noise_scale: f64, rng_seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
        }
        if !(noise_scale > 0.0) {
            return Err(Error::InvalidConfig("noise_scale must be > 0".into()));
        }
        Ok(Self { family, n_samples, noise_scale, rng_seed })
    }
}

const PINWHEEL_ARMS: usize = 5;
const PINWHEEL_RATE: f64 = 0.25;
const EIGHT_GAUSSIANS_MODES: usize = 8;
const EIGHT_GAUSSIANS_RADIUS: f64 = 2.0;

/// Generates 2-d samples; deterministic per seed, properties unset.
pub fn generate_toy(config: &ToyConfig) -> Result<DesignSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let n = config.n_samples;
    let mut points = Array2::zeros((n, 2));
    match config.family {
        ToyFamily::EightGaussians => {
            for i in 0..n {
                let k = i % EIGHT_GAUSSIANS_MODES;
                let angle = 2.0 * std::f64::consts::PI * k as f64 / EIGHT_GAUSSIANS_MODES as f64;
                let gx: f64 = rng.sample(StandardNormal);
                let gy: f64 = rng.sample(StandardNormal);
                points[[i, 0]] = EIGHT_GAUSSIANS_RADIUS * angle.cos() + config.noise_scale * gx;
                points[[i, 1]] = EIGHT_GAUSSIANS_RADIUS * angle.sin() + config.noise_scale * gy;
            }
        }
        ToyFamily::Pinwheel => {
            // Radial noise is wider than tangential noise so the arms stay
            // thin; the exp(radius) term produces the spiral warp.
            let radial_std = 3.0 * config.noise_scale;
            let tangential_std = 0.5 * config.noise_scale;
            for i in 0..n {
                let arm = i % PINWHEEL_ARMS;
                let base = 2.0 * std::f64::consts::PI * arm as f64 / PINWHEEL_ARMS as f64;
                let gr: f64 = rng.sample(StandardNormal);
                let gt: f64 = rng.sample(StandardNormal);
                let r = 1.0 + radial_std * gr;
                let t = tangential_std * gt;
                let angle = base + PINWHEEL_RATE * r.exp();
                points[[i, 0]] = r * angle.cos() - t * angle.sin();
                points[[i, 1]] = r * angle.sin() + t * angle.cos();
            }
        }
    }
    DesignSet::unlabeled(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_rejected() {
        assert!(ToyConfig::new(ToyFamily::Pinwheel, 0, 0.1, 0).is_err());
        assert!(ToyConfig::new(ToyFamily::Pinwheel, 10, 0.0, 0).is_err());
    }

    #[test]
    fn eight_gaussians_degenerate_noise_sits_on_mode_centers() {
        let config = ToyConfig::new(ToyFamily::EightGaussians, 64, 1e-12, 3).unwrap();
        let data = generate_toy(&config).unwrap();
        for i in 0..data.len() {
            let p = data.design(i);
            let on_a_center = (0..8).any(|k| {
                let angle = 2.0 * std::f64::consts::PI * k as f64 / 8.0;
                let dx = p[0] - 2.0 * angle.cos();
                let dy = p[1] - 2.0 * angle.sin();
                (dx * dx + dy * dy).sqrt() < 1e-6
            });
            assert!(on_a_center, "sample {i} off-center");
        }
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        for family in [ToyFamily::Pinwheel, ToyFamily::EightGaussians] {
            let config = ToyConfig::new(family, 100, 0.1, 42).unwrap();
            let a = generate_toy(&config).unwrap();
            let b = generate_toy(&config).unwrap();
            assert_eq!(a.designs(), b.designs());
        }
    }

    #[test]
    fn pinwheel_has_requested_size_and_dim() {
        let config = ToyConfig::new(ToyFamily::Pinwheel, 73, 0.1, 1).unwrap();
        let data = generate_toy(&config).unwrap();
        assert_eq!(data.len(), 73);
        assert_eq!(data.dim(), 2);
        assert!(!data.has_properties());
    }
}
