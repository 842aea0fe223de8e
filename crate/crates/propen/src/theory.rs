//! Executable checks for the method's supporting theory: the
//! improving-displacement direction result, the likelihood lower bound, the
//! step-size corollary, and the colinearity sufficient condition. These are
//! verification harnesses, not production paths.

use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::datasets::{AnalyticProperty, KdeModel};
use crate::enhance::tabular_minimizer;
use crate::error::{Error, Result};
use crate::matching::{MatchConfig, MatchedDataset};

/// Largest absolute eigenvalue of a symmetric matrix, by dense
/// eigendecomposition.
pub fn spectral_norm(h: &Array2<f64>) -> f64 {
    let n = h.nrows();
    let m = nalgebra::DMatrix::from_row_iterator(n, n, h.iter().cloned());
    let eigen = nalgebra::SymmetricEigen::new(m);
    eigen.eigenvalues.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()))
}

fn cosine(a: &Array1<f64>, b: &Array1<f64>) -> f64 {
    let norms = a.dot(a).sqrt() * b.dot(b).sqrt();
    if norms == 0.0 {
        0.0
    } else {
        a.dot(b) / norms
    }
}

/// Samples a point uniformly in the ball of the given radius around `seed`.
fn sample_in_ball(seed: ArrayView1<f64>, radius: f64, rng: &mut ChaCha8Rng) -> Array1<f64> {
    let d = seed.len();
    loop {
        let dir = Array1::from_shape_fn(d, |_| rng.sample::<f64, _>(StandardNormal));
        let norm = dir.dot(&dir).sqrt();
        if norm < 1e-12 {
            continue;
        }
        let r = radius * rng.random_range(0.0..1.0f64).powf(1.0 / d as f64);
        return &seed + &dir.mapv(|v| v * r / norm);
    }
}

/// Monte Carlo check of the direction result: samples points uniformly in the
/// ball of radius sqrt(`radius`) (squared-norm matching convention) around
/// `seed`, keeps those that improve `g`, and returns the cosine between the
/// mean retained displacement and the gradient of `g` at the seed.
pub fn thm1_direction_check(
    g: &AnalyticProperty,
    seed: ArrayView1<f64>,
    radius: f64,
    n_samples: usize,
    rng_seed: u64,
) -> Result<f64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig("radius must be > 0".into()));
    }
    if n_samples == 0 {
        return Err(Error::InvalidConfig("n_samples must be >= 1".into()));
    }
    let (g_seed, grad) = g.evaluate(seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let ball_radius = radius.sqrt();
    let mut mean_step = Array1::zeros(seed.len());
    let mut retained = 0usize;
    for _ in 0..n_samples {
        let x = sample_in_ball(seed, ball_radius, &mut rng);
        if g.value(x.view())? > g_seed {
            mean_step += &(&x - &seed);
            retained += 1;
        }
    }
    if retained == 0 {
        return Err(Error::NoImprovingSamples);
    }
    mean_step /= retained as f64;
    Ok(cosine(&mean_step, &grad))
}

/// Likelihood lower bound: compares `p(f*(x))` against the mean density of
/// the matched targets minus the second-order variance penalty
/// `||H_p||_2 * var(M_x) / 2`. Returns `(lhs, rhs, holds)`; `holds` allows a
/// relative slack of 1e-9 so the zero-variance equality case counts.
pub fn thm2_bound_check(
    matched: &MatchedDataset,
    kde: &KdeModel,
    seed_index: usize,
    beta: f64,
) -> Result<(f64, f64, bool)> {
    let f_star = tabular_minimizer(matched, seed_index, beta)?;
    let lhs = kde.density(f_star.view())?;
    let indices = matched.match_indices_of(seed_index)?;
    let mean_density = indices
        .iter()
        .map(|&j| kde.density(matched.data().design(j)))
        .sum::<Result<f64>>()?
        / indices.len() as f64;
    let hess = kde.density_hessian(f_star.view())?;
    let variance = matched.match_variance(seed_index)?;
    let rhs = mean_density - spectral_norm(&hess) * variance / 2.0;
    let slack = 1e-9 * lhs.abs().max(rhs.abs());
    Ok((lhs, rhs, lhs >= rhs - slack))
}

/// Step norms `||f*_beta(x) - x||` for each requested beta; callers assert
/// the exact `1/(1+beta)` scaling.
pub fn corollary_step_scaling(
    matched: &MatchedDataset,
    seed_index: usize,
    betas: &[f64],
) -> Result<Vec<f64>> {
    let x = matched.data().design(seed_index);
    betas
        .iter()
        .map(|&beta| {
            let f = tabular_minimizer(matched, seed_index, beta)?;
            Ok((&f - &x).mapv(|d| d * d).sum().sqrt())
        })
        .collect()
}

/// Constants for the colinearity sufficient condition: a Lipschitz bound
/// `lambda1` on g, a smoothness bound `lambda2` on its gradient, the target
/// colinearity `alpha`, and the matching gap lower bound `delta_y_lower`.
#[derive(Debug, Clone, Copy)]
pub struct ColinearityCheckConfig {
    pub lambda1: f64,
    pub lambda2: f64,
    pub alpha: f64,
    pub delta_y_lower: f64,
}

impl ColinearityCheckConfig {
    pub fn new(lambda1: f64, lambda2: f64, alpha: f64, delta_y_lower: f64) -> Result<Self> {
        if !(lambda1 > 0.0) || !(lambda2 > 0.0) {
            return Err(Error::InvalidConfig("lambda1 and lambda2 must be > 0".into()));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidConfig("alpha must be in (0, 1]".into()));
        }
        if !(delta_y_lower >= 0.0) {
            return Err(Error::InvalidConfig("delta_y_lower must be >= 0".into()));
        }
        Ok(Self { lambda1, lambda2, alpha, delta_y_lower })
    }
}

/// Evaluates the sufficient condition
/// `delta_x < 2 (delta_y_lower - alpha * lambda1 * ||E[x'] - (1-beta) x||) / lambda2`
/// and the realized cosine between the closed-form step `f*_beta(x) - x` and
/// the gradient of `g` at the seed. The condition is one-sided: when it is
/// met the cosine must reach `alpha`, but the cosine may reach `alpha`
/// without it.
pub fn colinearity_condition(
    config: &ColinearityCheckConfig,
    match_config: &MatchConfig,
    matched: &MatchedDataset,
    seed_index: usize,
    beta: f64,
    g: &AnalyticProperty,
) -> Result<(bool, f64)> {
    let x = matched.data().design(seed_index);
    let mean = matched.match_mean(seed_index)?;
    let shifted = &mean - &x.mapv(|v| (1.0 - beta) * v);
    let norm = shifted.dot(&shifted).sqrt();
    let bound = 2.0 * (config.delta_y_lower - config.alpha * config.lambda1 * norm) / config.lambda2;
    let condition_met = match_config.delta_x < bound;
    let f_star = tabular_minimizer(matched, seed_index, beta)?;
    let step = &f_star - &x;
    let (_, grad) = g.evaluate(x)?;
    Ok((condition_met, cosine(&step, &grad)))
}

/// One theory-check result row for CSV emission.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub check: String,
    pub instance: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Writes `check,instance,lhs,rhs,holds` rows.
pub fn write_checks_csv<W: Write>(w: W, records: &[CheckRecord]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    writer.write_record(["check", "instance", "lhs", "rhs", "holds"])?;
    for r in records {
        writer.write_record([
            r.check.clone(),
            r.instance.clone(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.holds.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
