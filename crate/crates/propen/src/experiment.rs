//! Experiment orchestration: TOML config parsing, seeded repetitions, the
//! method sweep (implicit variants + explicit baseline), metric reporting,
//! and the external airfoil-property exchange.
//!
//! Per repetition `r` the protocol is: regenerate data with seed `base + r`,
//! split a holdout fraction, fit a KDE on the training split (the toy
//! property is its log-density), build the matched dataset, train every
//! method, optimize every holdout seed, and append one report row per method.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::{Array1, Array2, ArrayView1};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::baseline::{guide, train_explicit, GuidanceConfig};
use crate::datasets::{
    embed, generate_naca, generate_toy, synthetic_lift_drag, Embedding, KdeModel, NacaParams,
    ToyConfig, ToyFamily,
};
use crate::enhance::{optimize, train_propen, ArchSpec, IoMode, OptimizeConfig, PropEnVariant};
use crate::error::{Error, Result};
use crate::eval::{
    average_improvement, novelty, ratio_of_improvement, summarize, uniqueness, write_reports_csv,
    write_summary_csv, EvalReport,
};
use crate::matching::{build_matched_dataset, DesignSet, MatchConfig};
use crate::neural::TrainConfig;

/// What data a repetition generates.
#[derive(Debug, Clone)]
pub enum DatasetSpec {
    /// 2-d toy family, optionally embedded isometrically into `d` dimensions.
    /// The property is the log-density of a KDE (bandwidth `kde_sigma`) fit
    /// on the training split.
    Toy { family: ToyFamily, n: usize, d: usize, noise: f64, seed: u64, kde_sigma: f64 },
    /// NACA 4-digit shapes with randomly drawn parameters and the built-in
    /// synthetic lift/drag property. Design dimension is `2 * n_points`.
    Airfoil { n: usize, n_points: usize, seed: u64, kde_sigma: f64 },
}

impl DatasetSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DatasetSpec::Toy { family: ToyFamily::Pinwheel, .. } => "pinwheel",
            DatasetSpec::Toy { family: ToyFamily::EightGaussians, .. } => "eight_gaussians",
            DatasetSpec::Airfoil { .. } => "airfoil",
        }
    }

    pub fn n(&self) -> usize {
        match self {
            DatasetSpec::Toy { n, .. } | DatasetSpec::Airfoil { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            DatasetSpec::Toy { d, .. } => *d,
            DatasetSpec::Airfoil { n_points, .. } => 2 * n_points,
        }
    }

    fn base_seed(&self) -> u64 {
        match self {
            DatasetSpec::Toy { seed, .. } | DatasetSpec::Airfoil { seed, .. } => *seed,
        }
    }

    fn kde_sigma(&self) -> f64 {
        match self {
            DatasetSpec::Toy { kde_sigma, .. } | DatasetSpec::Airfoil { kde_sigma, .. } => *kde_sigma,
        }
    }
}

/// The methods the runner knows how to sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    PropEnX2x,
    PropEnXy2xy,
    PropEnX2xMix,
    PropEnXy2xyMix,
    Explicit,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::PropEnX2x => "propen_x2x",
            Method::PropEnXy2xy => "propen_xy2xy",
            Method::PropEnX2xMix => "propen_x2x_mix",
            Method::PropEnXy2xyMix => "propen_xy2xy_mix",
            Method::Explicit => "explicit",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "propen_x2x" => Ok(Method::PropEnX2x),
            "propen_xy2xy" => Ok(Method::PropEnXy2xy),
            "propen_x2x_mix" => Ok(Method::PropEnX2xMix),
            "propen_xy2xy_mix" => Ok(Method::PropEnXy2xyMix),
            "explicit" => Ok(Method::Explicit),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected propen_x2x, propen_xy2xy, propen_x2x_mix, propen_xy2xy_mix, or explicit)"
            ))),
        }
    }

    fn variant(&self, mix_beta: f64) -> Option<PropEnVariant> {
        match self {
            Method::PropEnX2x => Some(PropEnVariant { io_mode: IoMode::X2X, mix_beta: 0.0 }),
            Method::PropEnXy2xy => Some(PropEnVariant { io_mode: IoMode::Xy2Xy, mix_beta: 0.0 }),
            Method::PropEnX2xMix => Some(PropEnVariant { io_mode: IoMode::X2X, mix_beta }),
            Method::PropEnXy2xyMix => Some(PropEnVariant { io_mode: IoMode::Xy2Xy, mix_beta }),
            Method::Explicit => None,
        }
    }
}

/// Network training hyperparameters (the RNG seed comes from the repetition).
#[derive(Debug, Clone, Copy)]
pub struct TrainSpec {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
}

/// A fully validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: DatasetSpec,
    pub match_spec: MatchConfig,
    pub arch: ArchSpec,
    pub train: TrainSpec,
    pub optimize: OptimizeConfig,
    pub guidance: GuidanceConfig,
    pub methods: Vec<Method>,
    pub mix_beta: f64,
    pub repetitions: usize,
    pub holdout_fraction: f64,
    pub metric_tol: f64,
    pub output_dir: PathBuf,
}

// ---- TOML wire format -------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    dataset: RawDataset,
    #[serde(rename = "match")]
    match_spec: RawMatch,
    arch: RawArch,
    train: RawTrain,
    #[serde(default)]
    optimize: RawOptimize,
    #[serde(default)]
    guidance: RawGuidance,
    run: RawRun,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDataset {
    family: String,
    n: usize,
    #[serde(default)]
    d: Option<usize>,
    #[serde(default)]
    n_points: Option<usize>,
    #[serde(default = "default_noise")]
    noise: f64,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_kde_sigma")]
    kde_sigma: f64,
}

fn default_noise() -> f64 {
    0.1
}

fn default_kde_sigma() -> f64 {
    0.2
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatch {
    delta_x: f64,
    delta_y: f64,
    #[serde(default)]
    delta_y_lower: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArch {
    hidden: Vec<usize>,
    latent: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrain {
    epochs: usize,
    batch_size: usize,
    learning_rate: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawOptimize {
    max_steps: Option<usize>,
    convergence_eps: Option<f64>,
    record_all: Option<bool>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawGuidance {
    step_size: Option<f64>,
    n_steps: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    methods: Vec<String>,
    #[serde(default = "default_mix_beta")]
    mix_beta: f64,
    repetitions: usize,
    #[serde(default = "default_holdout")]
    holdout_fraction: f64,
    #[serde(default = "default_metric_tol")]
    metric_tol: f64,
    output_dir: String,
}

fn default_mix_beta() -> f64 {
    1.0
}

fn default_holdout() -> f64 {
    0.2
}

fn default_metric_tol() -> f64 {
    crate::eval::DEFAULT_METRIC_TOL
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config parse: {e}")))?;
        let dataset = match raw.dataset.family.as_str() {
            "pinwheel" | "eight_gaussians" => {
                let family = if raw.dataset.family == "pinwheel" {
                    ToyFamily::Pinwheel
                } else {
                    ToyFamily::EightGaussians
                };
                let d = raw.dataset.d.unwrap_or(2);
                if d < 2 {
                    return Err(Error::InvalidConfig("dataset.d must be >= 2".into()));
                }
                // validate generation params eagerly
                ToyConfig::new(family, raw.dataset.n, raw.dataset.noise, raw.dataset.seed)?;
                DatasetSpec::Toy {
                    family,
                    n: raw.dataset.n,
                    d,
                    noise: raw.dataset.noise,
                    seed: raw.dataset.seed,
                    kde_sigma: raw.dataset.kde_sigma,
                }
            }
            "airfoil" => {
                let n_points = raw.dataset.n_points.unwrap_or(200);
                if n_points < 4 || n_points % 2 != 0 {
                    return Err(Error::InvalidConfig("dataset.n_points must be even and >= 4".into()));
                }
                if raw.dataset.n == 0 {
                    return Err(Error::InvalidConfig("dataset.n must be >= 1".into()));
                }
                DatasetSpec::Airfoil {
                    n: raw.dataset.n,
                    n_points,
                    seed: raw.dataset.seed,
                    kde_sigma: raw.dataset.kde_sigma,
                }
            }
            other => {
                return Err(Error::InvalidConfig(format!(
                    "dataset.family '{other}' (expected pinwheel, eight_gaussians, or airfoil)"
                )))
            }
        };
        if !(raw.dataset.kde_sigma > 0.0) {
            return Err(Error::InvalidConfig("dataset.kde_sigma must be > 0".into()));
        }
        let match_spec =
            MatchConfig::new(raw.match_spec.delta_x, raw.match_spec.delta_y, raw.match_spec.delta_y_lower)?;
        let arch = ArchSpec::new(raw.arch.hidden, raw.arch.latent)?;
        if raw.train.epochs == 0 || raw.train.batch_size == 0 || !(raw.train.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(
                "train.epochs, train.batch_size must be >= 1 and train.learning_rate > 0".into(),
            ));
        }
        let train = TrainSpec {
            epochs: raw.train.epochs,
            batch_size: raw.train.batch_size,
            learning_rate: raw.train.learning_rate,
        };
        let defaults = OptimizeConfig::default();
        let optimize = OptimizeConfig::new(
            raw.optimize.max_steps.unwrap_or(defaults.max_steps),
            raw.optimize.convergence_eps.unwrap_or(defaults.convergence_eps),
            raw.optimize.record_all.unwrap_or(defaults.record_all),
        )?;
        let gdefaults = GuidanceConfig::default();
        let guidance = GuidanceConfig::new(
            raw.guidance.step_size.unwrap_or(gdefaults.step_size),
            raw.guidance.n_steps.unwrap_or(gdefaults.n_steps),
        )?;
        if raw.run.methods.is_empty() {
            return Err(Error::InvalidConfig("run.methods must not be empty".into()));
        }
        let methods = raw.run.methods.iter().map(|s| Method::parse(s)).collect::<Result<Vec<_>>>()?;
        if raw.run.repetitions == 0 {
            return Err(Error::InvalidConfig("run.repetitions must be >= 1".into()));
        }
        if !(raw.run.holdout_fraction > 0.0 && raw.run.holdout_fraction < 1.0) {
            return Err(Error::InvalidConfig("run.holdout_fraction must be in (0, 1)".into()));
        }
        if !(raw.run.mix_beta >= 0.0) {
            return Err(Error::InvalidConfig("run.mix_beta must be >= 0".into()));
        }
        if !(raw.run.metric_tol > 0.0) {
            return Err(Error::InvalidConfig("run.metric_tol must be > 0".into()));
        }
        Ok(Self {
            dataset,
            match_spec,
            arch,
            train,
            optimize,
            guidance,
            methods,
            mix_beta: raw.run.mix_beta,
            repetitions: raw.run.repetitions,
            holdout_fraction: raw.run.holdout_fraction,
            metric_tol: raw.run.metric_tol,
            output_dir: PathBuf::from(raw.run.output_dir),
        })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }
}

/// A generated, labeled, split repetition dataset.
struct RepetitionData {
    train: DesignSet,
    holdout: DesignSet,
    kde: KdeModel,
    /// toy: KDE log-density; airfoil: synthetic lift/drag.
    oracle_is_kde: bool,
}

impl RepetitionData {
    fn property(&self, x: ArrayView1<f64>) -> Result<f64> {
        if self.oracle_is_kde {
            self.kde.log_density(x)
        } else {
            synthetic_lift_drag(x.as_slice().ok_or_else(|| {
                Error::InvalidConfig("non-contiguous design vector".into())
            })?)
        }
    }
}

fn generate_airfoil_set(n: usize, n_points: usize, seed: u64) -> Result<DesignSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut designs = Array2::zeros((n, 2 * n_points));
    let mut props = Array1::zeros(n);
    for i in 0..n {
        let m = rng.random_range(0.0..0.09);
        let p = rng.random_range(0.2..0.8);
        let t = rng.random_range(0.05..0.2);
        let params = NacaParams::new(m, p, t, n_points)?;
        let coords = generate_naca(&params);
        props[i] = synthetic_lift_drag(&coords)?;
        designs.row_mut(i).assign(&Array1::from_vec(coords));
    }
    DesignSet::new(designs, props)
}

/// Builds one repetition's data: generate, split, fit the KDE on the
/// training split, and assign properties.
fn build_repetition(config: &ExperimentConfig, rep: usize) -> Result<RepetitionData> {
    let data_seed = config.dataset.base_seed().wrapping_add(rep as u64);
    let (unlabeled, oracle_is_kde) = match &config.dataset {
        DatasetSpec::Toy { family, n, d, noise, .. } => {
            let toy = generate_toy(&ToyConfig::new(*family, *n, *noise, data_seed)?)?;
            let data = if *d > 2 {
                embed(&toy, &Embedding::random(*d, data_seed.wrapping_add(0xE3B))?)?
            } else {
                toy
            };
            (data, true)
        }
        DatasetSpec::Airfoil { n, n_points, .. } => {
            (generate_airfoil_set(*n, *n_points, data_seed)?, false)
        }
    };
    let n = unlabeled.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(data_seed.wrapping_add(0x5917));
    order.shuffle(&mut rng);
    let holdout_count = ((n as f64 * config.holdout_fraction).round() as usize).clamp(1, n - 1);
    let (holdout_idx, train_idx) = order.split_at(holdout_count);
    let train = unlabeled.select(train_idx)?;
    let holdout = unlabeled.select(holdout_idx)?;
    let kde = KdeModel::fit(train.designs().clone(), config.dataset.kde_sigma())?;
    if oracle_is_kde {
        let label = |set: &DesignSet| -> Result<DesignSet> {
            let props = (0..set.len())
                .map(|i| kde.log_density(set.design(i)))
                .collect::<Result<Vec<_>>>()?;
            set.clone().with_properties(Array1::from_vec(props))
        };
        let train = label(&train)?;
        let holdout = label(&holdout)?;
        Ok(RepetitionData { train, holdout, kde, oracle_is_kde })
    } else {
        Ok(RepetitionData { train, holdout, kde, oracle_is_kde })
    }
}

/// Runs one method on one repetition's data and returns its report row.
fn run_method(
    config: &ExperimentConfig,
    data: &RepetitionData,
    method: Method,
    rep: usize,
) -> Result<EvalReport> {
    let data_seed = config.dataset.base_seed().wrapping_add(rep as u64);
    let train_config = TrainConfig::new(
        config.train.epochs,
        config.train.batch_size,
        config.train.learning_rate,
        data_seed,
        0.0,
    )?;
    let holdout_props = data.holdout.properties()?;
    let mut finals: Vec<Array1<f64>> = Vec::with_capacity(data.holdout.len());
    match method.variant(config.mix_beta) {
        Some(variant) => {
            let matched = build_matched_dataset(&data.train, &config.match_spec)?;
            let model = train_propen(&matched, variant, &config.arch, &train_config)?;
            for i in 0..data.holdout.len() {
                let seed_prop = matches!(variant.io_mode, IoMode::Xy2Xy).then(|| holdout_props[i]);
                let t = optimize(&model, data.holdout.design(i), seed_prop, &config.optimize, None)?;
                finals.push(t.final_state().clone());
            }
        }
        None => {
            let model = train_explicit(&data.train, &config.arch, &train_config)?;
            for i in 0..data.holdout.len() {
                let t = guide(&model, data.holdout.design(i), &config.guidance, None)?;
                finals.push(t.final_state().clone());
            }
        }
    }
    let mut pairs = Vec::with_capacity(finals.len());
    let mut loglik_seeds = 0.0;
    let mut loglik_cands = 0.0;
    for (i, cand) in finals.iter().enumerate() {
        let g_seed = holdout_props[i];
        let g_cand = data.property(cand.view())?;
        pairs.push((g_seed, g_cand));
        loglik_seeds += data.kde.log_density(data.holdout.design(i))?;
        loglik_cands += data.kde.log_density(cand.view())?;
    }
    Ok(EvalReport {
        method: method.name().into(),
        dataset: config.dataset.name().into(),
        n: config.dataset.n(),
        d: config.dataset.dim(),
        repetition: rep,
        ratio_of_improvement: ratio_of_improvement(&pairs)?,
        average_improvement: average_improvement(&pairs)?,
        uniqueness: uniqueness(&finals, config.metric_tol)?,
        novelty: novelty(&finals, &data.train, config.metric_tol)?,
        loglik_sum_seeds: loglik_seeds,
        loglik_sum_candidates: loglik_cands,
    })
}

/// Runs the full experiment and writes `rep_<r>.csv` per repetition plus
/// merged `reports.csv` and `summary.csv` into the output directory.
/// Returns all report rows.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<EvalReport>> {
    fs::create_dir_all(&config.output_dir)?;
    let mut reports = Vec::new();
    for rep in 0..config.repetitions {
        let data = build_repetition(config, rep)?;
        let mut rep_reports = Vec::new();
        for &method in &config.methods {
            rep_reports.push(run_method(config, &data, method, rep)?);
        }
        let rep_file = fs::File::create(config.output_dir.join(format!("rep_{rep}.csv")))?;
        write_reports_csv(rep_file, &rep_reports)?;
        reports.extend(rep_reports);
    }
    let all = fs::File::create(config.output_dir.join("reports.csv"))?;
    write_reports_csv(all, &reports)?;
    let summary_rows = summarize(&reports);
    let summary = fs::File::create(config.output_dir.join("summary.csv"))?;
    write_summary_csv(summary, &summary_rows)?;
    Ok(reports)
}

// ---- External airfoil property exchange --------------------------------

/// Writes one `shape_<id>.csv` (columns `x,y`) per design plus a
/// `manifest.csv` mapping id to file name.
pub fn export_airfoils(data: &DesignSet, dir: &Path) -> Result<()> {
    if data.dim() % 2 != 0 {
        return Err(Error::InvalidConfig("airfoil designs must have an even dimension".into()));
    }
    fs::create_dir_all(dir)?;
    let mut manifest = csv::Writer::from_writer(fs::File::create(dir.join("manifest.csv"))?);
    manifest.write_record(["id", "file"])?;
    for i in 0..data.len() {
        let file = format!("shape_{i}.csv");
        let mut w = csv::Writer::from_writer(fs::File::create(dir.join(&file))?);
        w.write_record(["x", "y"])?;
        let row = data.design(i);
        for pair in row.as_slice().unwrap().chunks(2) {
            w.write_record([pair[0].to_string(), pair[1].to_string()])?;
        }
        w.flush()?;
        manifest.write_record([i.to_string(), file])?;
    }
    manifest.flush()?;
    Ok(())
}

/// Reads an `id,property` CSV and replaces the set's properties with the
/// imported values. Shapes with no imported value are dropped; malformed
/// rows abort with their line numbers.
pub fn import_airfoil_properties<R: std::io::Read>(data: &DesignSet, r: R) -> Result<DesignSet> {
    let mut reader = csv::Reader::from_reader(r);
    let header = reader.headers()?.clone();
    if header.len() != 2 || &header[0] != "id" || &header[1] != "property" {
        return Err(Error::MalformedRows { lines: vec![1], reason: "expected header id,property".into() });
    }
    let mut values: BTreeMap<usize, f64> = BTreeMap::new();
    let mut bad_lines = Vec::new();
    for (k, record) in reader.records().enumerate() {
        let record = record?;
        let line = k + 2;
        let parsed = (|| {
            let id: usize = record.get(0)?.trim().parse().ok()?;
            let value: f64 = record.get(1)?.trim().parse().ok()?;
            value.is_finite().then_some((id, value))
        })();
        match parsed {
            Some((id, value)) if id < data.len() => {
                values.insert(id, value);
            }
            _ => bad_lines.push(line),
        }
    }
    if !bad_lines.is_empty() {
        return Err(Error::MalformedRows {
            lines: bad_lines,
            reason: "unparseable or out-of-range id/property".into(),
        });
    }
    let indices: Vec<usize> = values.keys().cloned().collect();
    let subset = data.select(&indices)?;
    let props = Array1::from_iter(values.values().cloned());
    DesignSet::unlabeled(subset.designs().clone())?.with_properties(props)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_config_text(output_dir: &str) -> String {
        format!(
            r#"
[dataset]
family = "eight_gaussians"
n = 50
d = 2
noise = 0.1
seed = 7
kde_sigma = 0.25

[match]
delta_x = 1.0
delta_y = 1.0

[arch]
hidden = [16]
latent = 8

[train]
epochs = 30
batch_size = 32
learning_rate = 1e-3

[run]
methods = ["propen_x2x", "explicit"]
repetitions = 1
output_dir = "{output_dir}"
"#
        )
    }

    #[test]
    fn parses_a_full_config() {
        let config = ExperimentConfig::from_toml_str(&toy_config_text("out")).unwrap();
        assert_eq!(config.dataset.name(), "eight_gaussians");
        assert_eq!(config.dataset.dim(), 2);
        assert_eq!(config.methods, vec![Method::PropEnX2x, Method::Explicit]);
        assert_eq!(config.optimize.max_steps, 30);
        assert_eq!(config.guidance.n_steps, 30);
        assert_eq!(config.holdout_fraction, 0.2);
    }

    #[test]
    fn rejects_bad_fields_with_messages() {
        let bad_family = toy_config_text("out").replace("eight_gaussians", "moons");
        let err = ExperimentConfig::from_toml_str(&bad_family).unwrap_err();
        assert!(err.to_string().contains("moons"));
        let bad_method = toy_config_text("out").replace("explicit", "diffusion");
        let err = ExperimentConfig::from_toml_str(&bad_method).unwrap_err();
        assert!(err.to_string().contains("diffusion"));
        let unknown_key = format!("{}\nbogus = 1\n", toy_config_text("out"));
        assert!(ExperimentConfig::from_toml_str(&unknown_key).is_err());
    }

    #[test]
    fn smoke_run_produces_reports_and_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("results");
        let mut config = ExperimentConfig::from_toml_str(&toy_config_text("unused")).unwrap();
        config.output_dir = out.clone();
        let reports = run_experiment(&config).unwrap();
        assert_eq!(reports.len(), 2); // 1 repetition x 2 methods
        assert!(out.join("rep_0.csv").exists());
        assert!(out.join("reports.csv").exists());
        assert!(out.join("summary.csv").exists());
        let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 3); // header + 2 methods
    }

    #[test]
    fn identical_configs_produce_byte_identical_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = ExperimentConfig::from_toml_str(&toy_config_text("unused")).unwrap();
        config.output_dir = dir.path().join("a");
        run_experiment(&config).unwrap();
        config.output_dir = dir.path().join("b");
        run_experiment(&config).unwrap();
        let a = fs::read(dir.path().join("a/reports.csv")).unwrap();
        let b = fs::read(dir.path().join("b/reports.csv")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn airfoil_export_import_roundtrip() {
        let data = generate_airfoil_set(5, 20, 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export_airfoils(&data, dir.path()).unwrap();
        assert!(dir.path().join("manifest.csv").exists());
        assert!(dir.path().join("shape_4.csv").exists());
        // constant property for every shape
        let imported_csv = "id,property\n0,1.0\n1,1.0\n2,1.0\n3,1.0\n4,1.0\n";
        let updated = import_airfoil_properties(&data, imported_csv.as_bytes()).unwrap();
        assert_eq!(updated.len(), 5);
        assert!(updated.properties().unwrap().iter().all(|&p| p == 1.0));
    }

    #[test]
    fn missing_id_drops_that_shape() {
        let data = generate_airfoil_set(4, 20, 3).unwrap();
        let imported_csv = "id,property\n0,1.0\n1,2.0\n3,4.0\n";
        let updated = import_airfoil_properties(&data, imported_csv.as_bytes()).unwrap();
        assert_eq!(updated.len(), 3);
        assert_eq!(updated.properties().unwrap().to_vec(), vec![1.0, 2.0, 4.0]);
        assert_eq!(updated.design(2), data.design(3));
    }

    #[test]
    fn malformed_import_rows_are_reported_by_line() {
        let data = generate_airfoil_set(3, 20, 3).unwrap();
        let imported_csv = "id,property\n0,1.0\nnope,2.0\n2,oops\n";
        let err = import_airfoil_properties(&data, imported_csv.as_bytes()).unwrap_err();
        match err {
            Error::MalformedRows { lines, .. } => assert_eq!(lines, vec![3, 4]),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn airfoil_smoke_run() {
        let dir = tempfile::tempdir().unwrap();
        let text = format!(
            r#"
[dataset]
family = "airfoil"
n = 30
n_points = 16
seed = 1
kde_sigma = 0.5

[match]
delta_x = 0.5
delta_y = 30.0

[arch]
hidden = [32]
latent = 8

[train]
epochs = 20
batch_size = 16
learning_rate = 1e-3

[run]
methods = ["propen_x2x"]
repetitions = 1
output_dir = "{}"
"#,
            dir.path().join("out").display()
        );
        let config = ExperimentConfig::from_toml_str(&text).unwrap();
        let reports = run_experiment(&config).unwrap();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].d, 32);
    }
}
