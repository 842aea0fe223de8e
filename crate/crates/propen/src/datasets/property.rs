//! Analytic test properties with known gradients.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

/// A property g with a closed-form gradient, used when theory checks need
/// exact Lipschitz/smoothness constants.
#[derive(Debug, Clone)]
pub enum AnalyticProperty {
    /// g(x) = w . x
    Linear { weights: Array1<f64> },
    /// g(x) = -(x - center)^T matrix (x - center), matrix symmetric PSD
    Quadratic { matrix: Array2<f64>, center: Array1<f64> },
}

impl AnalyticProperty {
    pub fn quadratic(matrix: Array2<f64>, center: Array1<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != center.len() {
            return Err(Error::DimensionMismatch { expected: matrix.nrows(), actual: center.len() });
        }
        for i in 0..matrix.nrows() {
            for j in 0..i {
                if (matrix[[i, j]] - matrix[[j, i]]).abs() > 1e-12 {
                    return Err(Error::InvalidConfig("quadratic matrix must be symmetric".into()));
                }
            }
        }
        Ok(Self::Quadratic { matrix, center })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Linear { weights } => weights.len(),
            Self::Quadratic { center, .. } => center.len(),
        }
    }

    /// Returns (value, gradient).
    pub fn evaluate(&self, x: ArrayView1<f64>) -> Result<(f64, Array1<f64>)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: x.len() });
        }
        match self {
            Self::Linear { weights } => Ok((weights.dot(&x), weights.clone())),
            Self::Quadratic { matrix, center } => {
                let diff = &x - center;
                let a_diff = matrix.dot(&diff);
                Ok((-diff.dot(&a_diff), a_diff.mapv(|v| -2.0 * v)))
            }
        }
    }

    pub fn value(&self, x: ArrayView1<f64>) -> Result<f64> {
        Ok(self.evaluate(x)?.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn linear_example() {
        let g = AnalyticProperty::Linear { weights: array![1.0, 0.0] };
        let (v, grad) = g.evaluate(array![3.0, 7.0].view()).unwrap();
        assert_eq!(v, 3.0);
        assert_eq!(grad, array![1.0, 0.0]);
    }

    #[test]
    fn quadratic_stationary_point() {
        let g = AnalyticProperty::quadratic(Array2::eye(2), Array1::zeros(2)).unwrap();
        let (v, grad) = g.evaluate(array![0.0, 0.0].view()).unwrap();
        assert_eq!(v, 0.0);
        assert!(grad.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let raw = Array2::from_shape_fn((3, 3), |_| rng.random_range(-1.0..1.0));
        let sym = (&raw + &raw.t()) / 2.0;
        let psd = sym.dot(&sym.t()); // symmetric PSD
        let cases = [
            AnalyticProperty::Linear { weights: array![0.3, -1.2, 0.7] },
            AnalyticProperty::quadratic(psd, array![0.1, -0.2, 0.5]).unwrap(),
        ];
        let h = 1e-6;
        for g in cases {
            for _ in 0..10 {
                let x = Array1::from_shape_fn(3, |_| rng.random_range(-2.0..2.0));
                let (_, grad) = g.evaluate(x.view()).unwrap();
                for k in 0..3 {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[k] += h;
                    xm[k] -= h;
                    let fd = (g.value(xp.view()).unwrap() - g.value(xm.view()).unwrap()) / (2.0 * h);
                    assert_abs_diff_eq!(grad[k], fd, epsilon = 1e-6);
                }
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let g = AnalyticProperty::Linear { weights: array![1.0, 0.0] };
        assert!(g.evaluate(array![1.0].view()).is_err());
    }
}
