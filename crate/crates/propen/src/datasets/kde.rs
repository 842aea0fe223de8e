//! Gaussian kernel density estimation with isotropic bandwidth.
//!
//! The density is `p(x) = (1/n) sum_i N(x; c_i, sigma^2 I)` with the full
//! Gaussian normalization; log-density evaluation is stabilized with
//! log-sum-exp. Analytic gradient and Hessian of the density are exposed for
//! the likelihood-bound checks.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};

pub const DEFAULT_BANDWIDTH: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct KdeModel {
    centers: Array2<f64>,
    bandwidth: f64,
}

impl KdeModel {
    pub fn fit(centers: Array2<f64>, bandwidth: f64) -> Result<Self> {
        if centers.nrows() == 0 {
            return Err(Error::InvalidConfig("KDE needs at least one center".into()));
        }
        if !(bandwidth > 0.0) {
            return Err(Error::InvalidConfig("bandwidth must be > 0".into()));
        }
        if centers.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("KDE centers".into()));
        }
        Ok(Self { centers, bandwidth })
    }

    pub fn dim(&self) -> usize {
        self.centers.ncols()
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    fn check_dim(&self, x: ArrayView1<f64>) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: x.len() });
        }
        Ok(())
    }

    /// Log-normalization of one kernel plus the 1/n mixture weight.
    fn log_norm(&self) -> f64 {
        let d = self.dim() as f64;
        let n = self.centers.nrows() as f64;
        -(n.ln()) - 0.5 * d * (2.0 * std::f64::consts::PI * self.bandwidth * self.bandwidth).ln()
    }

    fn exponents(&self, x: ArrayView1<f64>) -> Vec<f64> {
        let s2 = self.bandwidth * self.bandwidth;
        self.centers
            .rows()
            .into_iter()
            .map(|c| {
                let r2: f64 = c.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
                -r2 / (2.0 * s2)
            })
            .collect()
    }

    pub fn log_density(&self, x: ArrayView1<f64>) -> Result<f64> {
        self.check_dim(x)?;
        let exps = self.exponents(x);
        let max = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = exps.iter().map(|e| (e - max).exp()).sum();
        Ok(max + sum.ln() + self.log_norm())
    }

    pub fn density(&self, x: ArrayView1<f64>) -> Result<f64> {
        Ok(self.log_density(x)?.exp())
    }

    /// Analytic gradient of the density (not the log-density).
    pub fn density_gradient(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        self.check_dim(x)?;
        let s2 = self.bandwidth * self.bandwidth;
        let log_norm = self.log_norm();
        let mut grad = Array1::zeros(self.dim());
        for (c, e) in self.centers.rows().into_iter().zip(self.exponents(x)) {
            let w = (e + log_norm).exp();
            grad.iter_mut()
                .zip(x.iter().zip(c.iter()))
                .for_each(|(g, (xi, ci))| *g += w * (ci - xi) / s2);
        }
        Ok(grad)
    }

    /// Analytic Hessian of the density.
    pub fn density_hessian(&self, x: ArrayView1<f64>) -> Result<Array2<f64>> {
        self.check_dim(x)?;
        let d = self.dim();
        let s2 = self.bandwidth * self.bandwidth;
        let log_norm = self.log_norm();
        let mut hess = Array2::zeros((d, d));
        for (c, e) in self.centers.rows().into_iter().zip(self.exponents(x)) {
            let w = (e + log_norm).exp();
            let diff: Vec<f64> = x.iter().zip(c.iter()).map(|(xi, ci)| xi - ci).collect();
            for a in 0..d {
                for b in 0..d {
                    let mut term = diff[a] * diff[b] / (s2 * s2);
                    if a == b {
                        term -= 1.0 / s2;
                    }
                    hess[[a, b]] += w * term;
                }
            }
        }
        Ok(hess)
    }
}
