//! Implicit property-guided enhancement.
//!
//! A single encoder-decoder network is trained to map each design in a
//! matched dataset to its better-property partner; iterating the trained map
//! from a seed design then walks the seed toward better designs without any
//! explicit property predictor. The closed-form per-seed optimum
//! `f*(x) = (E[x'] + beta x) / (1 + beta)` is exposed as an oracle for tests
//! and theory checks.

use std::io::Write;

use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::matching::MatchedDataset;
use crate::neural::{train, Mlp, TrainConfig, TrainPair};
use crate::scaling::Standardizer;

/// Whether the network reconstructs design coordinates only (`X2X`) or the
/// design with the property appended as an extra coordinate (`Xy2Xy`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoMode {
    X2X,
    Xy2Xy,
}

/// One of the four method variants: an io mode plus the mix-regularizer
/// weight (0 disables the mix term).
#[derive(Debug, Clone, Copy)]
pub struct PropEnVariant {
    pub io_mode: IoMode,
    pub mix_beta: f64,
}

impl PropEnVariant {
    pub fn new(io_mode: IoMode, mix_beta: f64) -> Result<Self> {
        if !(mix_beta >= 0.0) {
            return Err(Error::InvalidConfig("mix_beta must be >= 0".into()));
        }
        Ok(Self { io_mode, mix_beta })
    }
}

/// Symmetric encoder-decoder shape: `hidden` widths on the way in, the
/// bottleneck `latent` width, then the hidden widths reversed on the way out.
#[derive(Debug, Clone)]
pub struct ArchSpec {
    pub hidden: Vec<usize>,
    pub latent: usize,
}

impl ArchSpec {
    pub fn new(hidden: Vec<usize>, latent: usize) -> Result<Self> {
        if latent == 0 || hidden.iter().any(|&w| w == 0) {
            return Err(Error::InvalidConfig("layer widths must be >= 1".into()));
        }
        Ok(Self { hidden, latent })
    }

    /// Full layer-size chain for the given input/output dimensions.
    pub fn dims(&self, in_dim: usize, out_dim: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(2 * self.hidden.len() + 3);
        dims.push(in_dim);
        dims.extend(&self.hidden);
        dims.push(self.latent);
        dims.extend(self.hidden.iter().rev());
        dims.push(out_dim);
        dims
    }

    /// Encoder half only: input through the bottleneck.
    pub fn encoder_dims(&self, in_dim: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 2);
        dims.push(in_dim);
        dims.extend(&self.hidden);
        dims.push(self.latent);
        dims
    }

    /// Decoder half only: bottleneck back out.
    pub fn decoder_dims(&self, out_dim: usize) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 2);
        dims.push(self.latent);
        dims.extend(self.hidden.iter().rev());
        dims.push(out_dim);
        dims
    }
}

/// A trained enhancement model: the network plus the standardizers needed to
/// move between raw and network coordinates.
#[derive(Debug, Clone)]
pub struct PropEnModel {
    mlp: Mlp,
    design_scaler: Standardizer,
    property_scaler: Option<Standardizer>,
    variant: PropEnVariant,
}

impl PropEnModel {
    /// Assembles a model from pre-built parts (used by tests and by callers
    /// that load a serialized network). `property_scaler` is required exactly
    /// when the variant is `Xy2Xy`.
    pub fn from_parts(
        mlp: Mlp,
        design_scaler: Standardizer,
        property_scaler: Option<Standardizer>,
        variant: PropEnVariant,
    ) -> Result<Self> {
        let m = design_scaler.dim();
        let expected = match variant.io_mode {
            IoMode::X2X => m,
            IoMode::Xy2Xy => m + 1,
        };
        if mlp.input_dim() != expected || mlp.output_dim() != expected {
            return Err(Error::DimensionMismatch { expected, actual: mlp.input_dim() });
        }
        if matches!(variant.io_mode, IoMode::Xy2Xy) && property_scaler.is_none() {
            return Err(Error::InvalidConfig("Xy2Xy model needs a property scaler".into()));
        }
        Ok(Self { mlp, design_scaler, property_scaler, variant })
    }

    pub fn mlp(&self) -> &Mlp {
        &self.mlp
    }

    pub fn variant(&self) -> PropEnVariant {
        self.variant
    }

    pub fn design_dim(&self) -> usize {
        self.design_scaler.dim()
    }

    /// One application of the trained map in raw design coordinates.
    /// For `Xy2Xy` a property value must accompany the design; the returned
    /// scalar is the model's predicted property (raw units).
    pub fn step(&self, design: ArrayView1<f64>, property: Option<f64>) -> Result<(Array1<f64>, Option<f64>)> {
        let input = self.encode_input(design, property)?;
        let output = self.mlp.forward(input.view())?;
        self.decode_output(&output)
    }

    fn encode_input(&self, design: ArrayView1<f64>, property: Option<f64>) -> Result<Array1<f64>> {
        let scaled = self.design_scaler.transform(design)?;
        match self.variant.io_mode {
            IoMode::X2X => Ok(scaled),
            IoMode::Xy2Xy => {
                let p = property.ok_or(Error::MissingSeedProperty)?;
                let ps = self.property_scaler.as_ref().unwrap();
                let mut v = scaled.to_vec();
                v.push(ps.transform_scalar(p));
                Ok(Array1::from_vec(v))
            }
        }
    }

    fn decode_output(&self, output: &Array1<f64>) -> Result<(Array1<f64>, Option<f64>)> {
        let m = self.design_dim();
        let design = self.design_scaler.inverse(output.slice(ndarray::s![..m]))?;
        let property = match self.variant.io_mode {
            IoMode::X2X => None,
            IoMode::Xy2Xy => {
                Some(self.property_scaler.as_ref().unwrap().inverse_scalar(output[m]))
            }
        };
        Ok((design, property))
    }
}

/// Trains an enhancement model on a matched dataset. Designs (and, for
/// `Xy2Xy`, properties) are standardized over the full design set before
/// training; the variant's `mix_beta` overrides whatever the train config
/// carries.
pub fn train_propen(
    matched: &MatchedDataset,
    variant: PropEnVariant,
    arch: &ArchSpec,
    config: &TrainConfig,
) -> Result<PropEnModel> {
    if matched.is_empty() {
        return Err(Error::EmptyMatchedDataset);
    }
    let data = matched.data();
    let design_scaler = Standardizer::fit(data.designs())?;
    let property_scaler = match variant.io_mode {
        IoMode::X2X => None,
        IoMode::Xy2Xy => Some(Standardizer::fit_scalar(data.properties()?)?),
    };
    let props = if matches!(variant.io_mode, IoMode::Xy2Xy) {
        Some(data.properties()?)
    } else {
        None
    };
    let make_vec = |idx: usize| -> Result<Array1<f64>> {
        let scaled = design_scaler.transform(data.design(idx))?;
        match (&property_scaler, props) {
            (Some(ps), Some(p)) => {
                let mut v = scaled.to_vec();
                v.push(ps.transform_scalar(p[idx]));
                Ok(Array1::from_vec(v))
            }
            _ => Ok(scaled),
        }
    };
    let mut pairs = Vec::with_capacity(matched.len());
    for &(i, j) in matched.pairs() {
        let input = make_vec(i)?;
        let target = make_vec(j)?;
        let mix_target = (variant.mix_beta > 0.0).then(|| input.clone());
        pairs.push(TrainPair { input, target, mix_target });
    }
    let in_dim = pairs[0].input.len();
    let dims = arch.dims(in_dim, in_dim);
    let mut mlp = Mlp::seeded(&dims, config.rng_seed)?;
    let train_config = TrainConfig { mix_beta: variant.mix_beta, ..config.clone() };
    train(&mut mlp, &pairs, &train_config)?;
    PropEnModel::from_parts(mlp, design_scaler, property_scaler, variant)
}

/// Closed-form minimizer of the per-seed matched-reconstruction objective:
/// `(mean of matched targets + beta * x) / (1 + beta)`, in raw coordinates.
pub fn tabular_minimizer(matched: &MatchedDataset, seed_index: usize, beta: f64) -> Result<Array1<f64>> {
    if !(beta >= 0.0) {
        return Err(Error::InvalidConfig("beta must be >= 0".into()));
    }
    let mean = matched.match_mean(seed_index)?;
    let x = matched.data().design(seed_index);
    Ok((&mean + &x.mapv(|v| beta * v)) / (1.0 + beta))
}

/// Iteration controls for [`optimize`].
#[derive(Debug, Clone, Copy)]
pub struct OptimizeConfig {
    pub max_steps: usize,
    pub convergence_eps: f64,
    pub record_all: bool,
}

impl OptimizeConfig {
    pub fn new(max_steps: usize, convergence_eps: f64, record_all: bool) -> Result<Self> {
        if max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be >= 1".into()));
        }
        if !(convergence_eps > 0.0) {
            return Err(Error::InvalidConfig("convergence_eps must be > 0".into()));
        }
        Ok(Self { max_steps, convergence_eps, record_all })
    }
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self { max_steps: 30, convergence_eps: 1e-4, record_all: true }
    }
}

/// The path an optimization run took, in raw design coordinates.
/// `states[0]` is the seed; `converged` means the last applied step moved
/// less than `convergence_eps` in L2.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<Array1<f64>>,
    pub property_values: Option<Vec<f64>>,
    pub converged: bool,
    pub steps_taken: usize,
}

impl Trajectory {
    pub fn seed(&self) -> &Array1<f64> {
        &self.states[0]
    }

    pub fn final_state(&self) -> &Array1<f64> {
        self.states.last().unwrap()
    }
}

/// A scalar property evaluator used to annotate trajectories.
pub type PropertyOracle<'a> = &'a dyn Fn(ArrayView1<f64>) -> Result<f64>;

/// Re-applies the trained map from `seed` until an epsilon fixed point or
/// `max_steps`. For `Xy2Xy` the seed's property value initializes the extra
/// coordinate and the model's own prediction is re-fed afterwards, so
/// inference needs no oracle beyond step 0.
pub fn optimize(
    model: &PropEnModel,
    seed: ArrayView1<f64>,
    seed_property: Option<f64>,
    config: &OptimizeConfig,
    oracle: Option<PropertyOracle>,
) -> Result<Trajectory> {
    if seed.len() != model.design_dim() {
        return Err(Error::DimensionMismatch { expected: model.design_dim(), actual: seed.len() });
    }
    // Iterate in network (standardized) coordinates; record raw states.
    let mut current = model.encode_input(seed, seed_property)?;
    let mut states = vec![seed.to_owned()];
    let mut prev_raw = seed.to_owned();
    let mut converged = false;
    let mut steps_taken = 0;
    for step in 1..=config.max_steps {
        let output = model.mlp.forward(current.view())?;
        if output.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteState { step, partial: states });
        }
        let (raw, _) = model.decode_output(&output)?;
        let step_norm = (&raw - &prev_raw).mapv(|d| d * d).sum().sqrt();
        steps_taken = step;
        if config.record_all {
            states.push(raw.clone());
        }
        prev_raw = raw;
        current = output;
        if step_norm < config.convergence_eps {
            converged = true;
            break;
        }
    }
    if !config.record_all {
        states.push(prev_raw);
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
    Ok(Trajectory { states, property_values, converged, steps_taken })
}

/// Writes trajectories as `seed_id,step,x0..x{m-1},property` rows; a
/// `method` column is appended when a label is given.
pub fn write_trajectories_csv<W: Write>(
    w: W,
    trajectories: &[Trajectory],
    method: Option<&str>,
) -> Result<()> {
    let mut writer = csv::Writer::from_writer(w);
    let dim = trajectories.first().map(|t| t.states[0].len()).unwrap_or(0);
    let mut header: Vec<String> = vec!["seed_id".into(), "step".into()];
    header.extend((0..dim).map(|j| format!("x{j}")));
    header.push("property".into());
    if method.is_some() {
        header.push("method".into());
    }
    writer.write_record(&header)?;
    for (id, t) in trajectories.iter().enumerate() {
        for (step, state) in t.states.iter().enumerate() {
            let mut record: Vec<String> = vec![id.to_string(), step.to_string()];
            record.extend(state.iter().map(|v| v.to_string()));
            match &t.property_values {
                Some(p) => record.push(p[step].to_string()),
                None => record.push(String::new()),
            }
            if let Some(m) = method {
                record.push(m.to_string());
            }
            writer.write_record(&record)?;
        }
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{build_matched_dataset, DesignSet, MatchConfig};
    use crate::neural::{Activation, DenseLayer};
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array2};

    fn identity_model(dim: usize) -> PropEnModel {
        let mlp = Mlp::from_layers(vec![DenseLayer::new(
            Array2::eye(dim),
            Array1::zeros(dim),
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        PropEnModel::from_parts(
            mlp,
            Standardizer::identity(dim),
            None,
            PropEnVariant::new(IoMode::X2X, 0.0).unwrap(),
        )
        .unwrap()
    }

    fn shift_model(dim: usize, delta: f64) -> PropEnModel {
        let mlp = Mlp::from_layers(vec![DenseLayer::new(
            Array2::eye(dim),
            Array1::from_elem(dim, delta),
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        PropEnModel::from_parts(
            mlp,
            Standardizer::identity(dim),
            None,
            PropEnVariant::new(IoMode::X2X, 0.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn arch_dims_are_symmetric() {
        let arch = ArchSpec::new(vec![30, 30], 15).unwrap();
        assert_eq!(arch.dims(10, 10), vec![10, 30, 30, 15, 30, 30, 10]);
        assert_eq!(arch.encoder_dims(10), vec![10, 30, 30, 15]);
        assert_eq!(arch.decoder_dims(10), vec![15, 30, 30, 10]);
    }

    #[test]
    fn tabular_single_match_returns_the_match() {
        let data = DesignSet::new(array![[0.0, 0.0], [0.5, 0.5]], array![0.0, 0.4]).unwrap();
        let matched = build_matched_dataset(&data, &MatchConfig::new(10.0, 1.0, 0.0).unwrap()).unwrap();
        let f = tabular_minimizer(&matched, 0, 0.0).unwrap();
        assert_eq!(f, array![0.5, 0.5]);
    }

    #[test]
    fn tabular_hand_example_with_beta_one() {
        // x = (0,0), matches {(2,0), (0,2)}, beta = 1 -> (0.5, 0.5)
        let data = DesignSet::new(
            array![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
            array![0.0, 0.5, 0.5],
        )
        .unwrap();
        let matched = build_matched_dataset(&data, &MatchConfig::new(10.0, 1.0, 0.0).unwrap()).unwrap();
        let f = tabular_minimizer(&matched, 0, 1.0).unwrap();
        assert_abs_diff_eq!(f[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], 0.5, epsilon = 1e-15);
    }

    /// Independent oracle: gradient descent on the per-seed objective
    /// sum_j ||z - x'_j||^2 + beta * k * ||z - x||^2.
    fn numerical_minimizer(matched: &MatchedDataset, seed: usize, beta: f64) -> Array1<f64> {
        let targets = matched.matches_of(seed).unwrap();
        let k = targets.len() as f64;
        let x = matched.data().design(seed);
        let mut z = Array1::zeros(x.len());
        let step = 0.45 / (k * (1.0 + beta));
        for _ in 0..2000 {
            let mut grad = Array1::zeros(x.len());
            for t in &targets {
                grad += &(&z - t).mapv(|d| 2.0 * d);
            }
            grad += &(&z - &x).mapv(|d| 2.0 * beta * k * d);
            z -= &grad.mapv(|g| step * g);
        }
        z
    }

    #[test]
    fn tabular_matches_numerical_minimizer() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = 30;
            let designs = Array2::from_shape_fn((n, 3), |_| rng.random_range(-1.0..1.0));
            let props = Array1::from_shape_fn(n, |_| rng.random_range(-1.0..1.0));
            let data = DesignSet::new(designs, props).unwrap();
            let matched =
                build_matched_dataset(&data, &MatchConfig::new(2.0, 1.5, 0.0).unwrap()).unwrap();
            for seed in 0..n {
                if matched.match_indices_of(seed).unwrap().is_empty() {
                    continue;
                }
                for beta in [0.0, 0.5, 1.0, 3.0] {
                    let closed = tabular_minimizer(&matched, seed, beta).unwrap();
                    let numeric = numerical_minimizer(&matched, seed, beta);
                    for (a, b) in closed.iter().zip(numeric.iter()) {
                        assert_abs_diff_eq!(a, b, epsilon = 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn step_size_scales_exactly_with_one_plus_beta() {
        let data = DesignSet::new(
            array![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]],
            array![0.0, 0.5, 0.5],
        )
        .unwrap();
        let matched = build_matched_dataset(&data, &MatchConfig::new(10.0, 1.0, 0.0).unwrap()).unwrap();
        let x = data.design(0);
        let base = (&tabular_minimizer(&matched, 0, 0.0).unwrap() - &x)
            .mapv(|d| d * d)
            .sum()
            .sqrt();
        for beta in [0.0, 0.5, 1.0, 3.0] {
            let step = (&tabular_minimizer(&matched, 0, beta).unwrap() - &x)
                .mapv(|d| d * d)
                .sum()
                .sqrt();
            assert_abs_diff_eq!(step * (1.0 + beta), base, epsilon = 1e-12);
        }
    }

    #[test]
    fn tabular_unmatched_seed_errors() {
        let data = DesignSet::new(array![[0.0], [1.0]], array![1.0, 0.0]).unwrap();
        let matched = build_matched_dataset(&data, &MatchConfig::new(10.0, 2.0, 0.0).unwrap()).unwrap();
        // seed 0 has the maximum property, so nothing improves on it
        assert!(matches!(tabular_minimizer(&matched, 0, 0.0), Err(Error::UnmatchedSeed { .. })));
    }

    fn three_point_matched(data: &DesignSet) -> MatchedDataset<'_> {
        build_matched_dataset(data, &MatchConfig::new(1.0, 0.5, 0.0).unwrap()).unwrap()
    }

    #[test]
    fn training_on_one_realizable_pair_fits_it() {
        // {0, 0.5, 3} with properties {0, 0.3, 1.0}: only pair is (0 -> 0.5)
        let data = DesignSet::new(array![[0.0], [0.5], [3.0]], array![0.0, 0.3, 1.0]).unwrap();
        let matched = three_point_matched(&data);
        let arch = ArchSpec::new(vec![16], 8).unwrap();
        let config = TrainConfig::new(800, 8, 1e-2, 7, 0.0).unwrap();
        let model =
            train_propen(&matched, PropEnVariant::new(IoMode::X2X, 0.0).unwrap(), &arch, &config)
                .unwrap();
        let (out, _) = model.step(array![0.0].view(), None).unwrap();
        assert_abs_diff_eq!(out[0], 0.5, epsilon = 1e-2);
    }

    #[test]
    fn huge_mix_beta_makes_the_map_an_identity() {
        let data = DesignSet::new(array![[0.0], [0.5], [3.0]], array![0.0, 0.3, 1.0]).unwrap();
        let matched = three_point_matched(&data);
        let arch = ArchSpec::new(vec![16], 8).unwrap();
        let config = TrainConfig::new(800, 8, 1e-2, 7, 0.0).unwrap();
        let model =
            train_propen(&matched, PropEnVariant::new(IoMode::X2X, 1e6).unwrap(), &arch, &config)
                .unwrap();
        let (out, _) = model.step(array![0.0].view(), None).unwrap();
        assert_abs_diff_eq!(out[0], 0.0, epsilon = 1e-2);
    }

    #[test]
    fn empty_matched_dataset_is_rejected() {
        let data = DesignSet::new(array![[0.0], [10.0]], array![0.0, 0.1]).unwrap();
        let matched = three_point_matched(&data); // too far apart to match
        assert!(matched.is_empty());
        let arch = ArchSpec::new(vec![8], 4).unwrap();
        let config = TrainConfig::new(10, 8, 1e-2, 0, 0.0).unwrap();
        let err = train_propen(&matched, PropEnVariant::new(IoMode::X2X, 0.0).unwrap(), &arch, &config);
        assert!(matches!(err, Err(Error::EmptyMatchedDataset)));
    }

    #[test]
    fn identity_map_converges_immediately() {
        let model = identity_model(2);
        let config = OptimizeConfig::new(30, 1e-4, true).unwrap();
        let t = optimize(&model, array![1.0, -2.0].view(), None, &config, None).unwrap();
        assert!(t.converged);
        assert_eq!(t.steps_taken, 1);
        assert_eq!(t.states.len(), 2);
        assert_eq!(t.states[0], t.states[1]);
    }

    #[test]
    fn constant_shift_never_converges() {
        let model = shift_model(2, 0.5);
        let config = OptimizeConfig::new(7, 1e-4, true).unwrap();
        let t = optimize(&model, array![0.0, 0.0].view(), None, &config, None).unwrap();
        assert!(!t.converged);
        assert_eq!(t.steps_taken, 7);
        assert_eq!(t.states.len(), 8);
        assert_abs_diff_eq!(t.final_state()[0], 3.5, epsilon = 1e-12);
    }

    #[test]
    fn record_all_false_keeps_seed_and_final_only() {
        let model = shift_model(1, 0.25);
        let config = OptimizeConfig::new(10, 1e-4, false).unwrap();
        let t = optimize(&model, array![0.0].view(), None, &config, None).unwrap();
        assert_eq!(t.states.len(), 2);
        assert_abs_diff_eq!(t.final_state()[0], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn diverging_map_reports_partial_trajectory() {
        // f(x) = 1e200 * x overflows to inf after a couple of steps
        let mlp = Mlp::from_layers(vec![DenseLayer::new(
            array![[1e200]],
            Array1::zeros(1),
            Activation::Identity,
        )
        .unwrap()])
        .unwrap();
        let model = PropEnModel::from_parts(
            mlp,
            Standardizer::identity(1),
            None,
            PropEnVariant::new(IoMode::X2X, 0.0).unwrap(),
        )
        .unwrap();
        let config = OptimizeConfig::new(30, 1e-4, true).unwrap();
        let err = optimize(&model, array![1.0].view(), None, &config, None).unwrap_err();
        match err {
            Error::NonFiniteState { step, partial } => {
                assert!(step >= 2);
                assert!(!partial.is_empty());
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn xy2xy_requires_seed_property() {
        let data = DesignSet::new(array![[0.0], [0.4]], array![0.0, 0.3]).unwrap();
        let matched = three_point_matched(&data);
        let arch = ArchSpec::new(vec![8], 4).unwrap();
        let config = TrainConfig::new(50, 8, 1e-2, 0, 0.0).unwrap();
        let model =
            train_propen(&matched, PropEnVariant::new(IoMode::Xy2Xy, 0.0).unwrap(), &arch, &config)
                .unwrap();
        let opt = OptimizeConfig::default();
        assert!(matches!(
            optimize(&model, array![0.0].view(), None, &opt, None),
            Err(Error::MissingSeedProperty)
        ));
        // with the property supplied it runs
        let t = optimize(&model, array![0.0].view(), Some(0.0), &opt, None).unwrap();
        assert!(!t.states.is_empty());
    }

    #[test]
    fn oracle_annotates_every_state() {
        let model = shift_model(1, 1.0);
        let config = OptimizeConfig::new(3, 1e-4, true).unwrap();
        let g = |x: ArrayView1<f64>| -> Result<f64> { Ok(2.0 * x[0]) };
        let t = optimize(&model, array![0.0].view(), None, &config, Some(&g)).unwrap();
        assert_eq!(t.property_values.as_ref().unwrap(), &vec![0.0, 2.0, 4.0, 6.0]);
    }

    #[test]
    fn trajectory_csv_format() {
        let t = Trajectory {
            states: vec![array![0.0, 1.0], array![0.5, 1.5]],
            property_values: Some(vec![0.25, 0.75]),
            converged: true,
            steps_taken: 1,
        };
        let mut buf = Vec::new();
        write_trajectories_csv(&mut buf, &[t], Some("x2x")).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "seed_id,step,x0,x1,property,method\n0,0,0,1,0.25,x2x\n0,1,0.5,1.5,0.75,x2x\n"
        );
    }

    #[test]
    fn trained_model_step_aligns_with_tabular_step() {
        use rand::prelude::*;
        // A small blob with a linear property: the trained map's step should
        // roughly agree in direction with the closed-form optimum on seeds
        // that have enough matches.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let n = 80;
        let designs = Array2::from_shape_fn((n, 2), |_| rng.random_range(-1.0..1.0));
        let props = Array1::from_shape_fn(n, |i| designs[[i, 0]] + 0.5 * designs[[i, 1]]);
        let data = DesignSet::new(designs, props).unwrap();
        let matched = build_matched_dataset(&data, &MatchConfig::new(1.0, 1.0, 0.0).unwrap()).unwrap();
        let arch = ArchSpec::new(vec![30, 30], 15).unwrap();
        let config = TrainConfig::new(400, 64, 1e-3, 3, 0.0).unwrap();
        let model =
            train_propen(&matched, PropEnVariant::new(IoMode::X2X, 0.0).unwrap(), &arch, &config)
                .unwrap();
        let mut cosines = Vec::new();
        for seed in 0..n {
            let idx = matched.match_indices_of(seed).unwrap();
            if idx.len() < 5 {
                continue;
            }
            let x = data.design(seed);
            let model_step = &model.step(x, None).unwrap().0 - &x;
            let tab_step = &tabular_minimizer(&matched, seed, 0.0).unwrap() - &x;
            let dot = model_step.dot(&tab_step);
            let norms = model_step.dot(&model_step).sqrt() * tab_step.dot(&tab_step).sqrt();
            if norms > 1e-12 {
                cosines.push(dot / norms);
            }
        }
        assert!(!cosines.is_empty());
        let mean = cosines.iter().sum::<f64>() / cosines.len() as f64;
        assert!(mean > 0.9, "mean cosine {mean}");
    }
}
