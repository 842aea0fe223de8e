//! Isometric embedding of 2-d data into a higher-dimensional space via a
//! random matrix with orthonormal columns.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matching::DesignSet;

/// A `d x 2` matrix with orthonormal columns; applying it preserves pairwise
/// L2 distances exactly (up to rounding).
#[derive(Debug, Clone)]
pub struct Embedding {
    matrix: Array2<f64>,
}

impl Embedding {
    pub fn identity() -> Self {
        Self { matrix: Array2::eye(2) }
    }

    /// Random orthonormal columns via Gram-Schmidt on Gaussian draws.
    pub fn random(target_dim: usize, rng_seed: u64) -> Result<Self> {
        if target_dim < 2 {
            return Err(Error::InvalidConfig("target_dim must be >= 2".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        loop {
            let v1 = Array1::from_shape_fn(target_dim, |_| rng.sample::<f64, _>(StandardNormal));
            let v2 = Array1::from_shape_fn(target_dim, |_| rng.sample::<f64, _>(StandardNormal));
            let n1 = v1.dot(&v1).sqrt();
            if n1 < 1e-8 {
                continue;
            }
            let q1 = &v1 / n1;
            let proj = q1.dot(&v2);
            let u2 = &v2 - &(&q1 * proj);
            let n2 = u2.dot(&u2).sqrt();
            if n2 < 1e-8 {
                continue;
            }
            let q2 = &u2 / n2;
            let mut matrix = Array2::zeros((target_dim, 2));
            matrix.column_mut(0).assign(&q1);
            matrix.column_mut(1).assign(&q2);
            return Ok(Self { matrix });
        }
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<f64> {
        &self.matrix
    }
}

/// Maps every 2-d design to `Q x`; property values carry over unchanged.
pub fn embed(points: &DesignSet, embedding: &Embedding) -> Result<DesignSet> {
    if points.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: points.dim() });
    }
    let embedded = points.designs().dot(&embedding.matrix.t());
    match points.has_properties() {
        true => DesignSet::new(embedded, points.properties()?.clone()),
        false => DesignSet::unlabeled(embedded),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn identity_embedding_leaves_points_unchanged() {
        let data = DesignSet::unlabeled(array![[1.0, 2.0], [-0.5, 0.25]]).unwrap();
        let out = embed(&data, &Embedding::identity()).unwrap();
        assert_eq!(out.designs(), data.designs());
    }

    #[test]
    fn zero_maps_to_zero() {
        let e = Embedding::random(17, 4).unwrap();
        let data = DesignSet::unlabeled(array![[0.0, 0.0]]).unwrap();
        let out = embed(&data, &e).unwrap();
        assert!(out.design(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn columns_are_orthonormal() {
        for seed in 0..10 {
            let e = Embedding::random(50, seed).unwrap();
            let gram = e.matrix().t().dot(e.matrix());
            assert_abs_diff_eq!(gram[[0, 0]], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(gram[[1, 1]], 1.0, epsilon = 1e-10);
            assert_abs_diff_eq!(gram[[0, 1]], 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pairwise_distances_preserved_on_a_sample() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let points = Array2::from_shape_fn((100, 2), |_| rng.random_range(-3.0..3.0));
        let data = DesignSet::unlabeled(points).unwrap();
        let e = Embedding::random(50, 21).unwrap();
        let out = embed(&data, &e).unwrap();
        for i in 0..data.len() {
            for j in (i + 1)..data.len() {
                let orig = crate::matching::squared_distance(data.design(i), data.design(j)).sqrt();
                let mapped = crate::matching::squared_distance(out.design(i), out.design(j)).sqrt();
                assert!((orig - mapped).abs() < 1e-9, "pair ({i},{j}): {orig} vs {mapped}");
            }
        }
    }
}
