//! Per-coordinate standardization (zero mean, unit variance).

use ndarray::{Array1, Array2, ArrayView1, Axis};

use crate::error::{Error, Result};

/// Minimum standard deviation; coordinates with less spread are left at this
/// floor so the inverse transform stays well-conditioned.
const STD_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: Array1<f64>,
    std: Array1<f64>,
}

impl Standardizer {
    /// The no-op standardizer (mean 0, std 1 in every coordinate).
    pub fn identity(dim: usize) -> Self {
        Self { mean: Array1::zeros(dim), std: Array1::ones(dim) }
    }

    /// Fits means and (population) standard deviations per column.
    pub fn fit(data: &Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let n = data.nrows() as f64;
        let mean = data.mean_axis(Axis(0)).unwrap();
        let mut std = Array1::zeros(data.ncols());
        for j in 0..data.ncols() {
            let var: f64 = data.column(j).iter().map(|v| (v - mean[j]) * (v - mean[j])).sum::<f64>() / n;
            std[j] = var.sqrt().max(STD_FLOOR);
        }
        Ok(Self { mean, std })
    }

    /// Fits a one-column standardizer for a scalar series.
    pub fn fit_scalar(values: &Array1<f64>) -> Result<Self> {
        let col = values.view().insert_axis(Axis(1)).to_owned();
        Self::fit(&col)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: x.len() });
        }
        Ok((&x - &self.mean) / &self.std)
    }

    pub fn inverse(&self, z: ArrayView1<f64>) -> Result<Array1<f64>> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: z.len() });
        }
        Ok(&z * &self.std + &self.mean)
    }

    pub fn transform_scalar(&self, v: f64) -> f64 {
        (v - self.mean[0]) / self.std[0]
    }

    pub fn inverse_scalar(&self, z: f64) -> f64 {
        z * self.std[0] + self.mean[0]
    }

    pub fn mean(&self) -> &Array1<f64> {
        &self.mean
    }

    pub fn std(&self) -> &Array1<f64> {
        &self.std
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn standardized_columns_have_zero_mean_unit_variance() {
        let data = array![[1.0, 10.0], [2.0, 30.0], [3.0, 20.0], [4.0, 40.0]];
        let s = Standardizer::fit(&data).unwrap();
        let transformed: Vec<Array1<f64>> =
            data.rows().into_iter().map(|r| s.transform(r).unwrap()).collect();
        for j in 0..2 {
            let vals: Vec<f64> = transformed.iter().map(|t| t[j]).collect();
            let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
            let var: f64 = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
            assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(var, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_undoes_transform() {
        let data = array![[1.0, -5.0, 0.0], [2.5, 3.0, 0.0], [-1.0, 7.5, 0.0]];
        let s = Standardizer::fit(&data).unwrap();
        for row in data.rows() {
            let back = s.inverse(s.transform(row).unwrap().view()).unwrap();
            for (a, b) in back.iter().zip(row.iter()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn constant_column_does_not_blow_up() {
        let data = array![[5.0], [5.0], [5.0]];
        let s = Standardizer::fit(&data).unwrap();
        let z = s.transform(array![5.0].view()).unwrap();
        assert!(z[0].is_finite());
        assert_abs_diff_eq!(s.inverse(z.view()).unwrap()[0], 5.0, epsilon = 1e-9);
    }

    #[test]
    fn scalar_helpers_match_vector_path() {
        let vals = array![1.0, 3.0, 5.0, 7.0];
        let s = Standardizer::fit_scalar(&vals).unwrap();
        assert_abs_diff_eq!(s.inverse_scalar(s.transform_scalar(3.0)), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.transform_scalar(4.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_data_rejected() {
        assert!(Standardizer::fit(&Array2::zeros((0, 2))).is_err());
    }
}
