//! Command-line entry point: experiment runner plus small utilities for
//! matching, optimization from saved models, theory checks, and NACA
//! geometry generation.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ndarray::array;

use propen::datasets::{generate_naca, AnalyticProperty, KdeModel, NacaParams};
use propen::enhance::{
    optimize, tabular_minimizer, write_trajectories_csv, IoMode, OptimizeConfig, PropEnModel,
    PropEnVariant,
};
use propen::error::Error;
use propen::experiment::{run_experiment, ExperimentConfig};
use propen::matching::{build_matched_dataset, DesignSet, MatchConfig};
use propen::neural::Mlp;
use propen::scaling::Standardizer;
use propen::theory::{
    corollary_step_scaling, thm1_direction_check, thm2_bound_check, write_checks_csv, CheckRecord,
};
use propen::Result;

#[derive(Parser)]
#[command(name = "propen", about = "Property-guided design enhancement toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full experiment from a TOML config file.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
    },
    /// Build the matched dataset for a labeled design CSV and print the
    /// source/target index pairs.
    Match {
        /// Design CSV with columns x0,...,x{m-1},y.
        data: PathBuf,
        /// Squared-distance threshold on designs.
        #[arg(long)]
        dx: f64,
        /// Upper bound on the property gap.
        #[arg(long)]
        dy: f64,
        /// Lower bound on the property gap (exclusive).
        #[arg(long, default_value_t = 0.0)]
        dy_lower: f64,
    },
    /// Iterate a saved network (raw coordinates, design-to-design mode) from
    /// each seed in a CSV and print the trajectories.
    Optimize {
        /// Saved model file.
        model: PathBuf,
        /// Seed CSV with columns x0,...,x{m-1},y (y may be empty).
        seeds: PathBuf,
        #[arg(long, default_value_t = 30)]
        max_steps: usize,
        #[arg(long, default_value_t = 1e-4)]
        eps: f64,
    },
    /// Run built-in theory checks and print check,instance,lhs,rhs,holds rows.
    CheckTheory {
        /// One of: thm1, thm2, corollary, all.
        which: String,
    },
    /// Print NACA 4-digit airfoil coordinates as x,y CSV rows.
    Naca {
        /// Maximum camber (fraction of chord).
        #[arg(long)]
        m: f64,
        /// Camber position (fraction of chord).
        #[arg(long)]
        p: f64,
        /// Maximum thickness (fraction of chord).
        #[arg(long)]
        t: f64,
        /// Total number of surface points (even).
        #[arg(long, default_value_t = 200)]
        n: usize,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) => 2,
        Error::EmptyMatchedDataset => 3,
        Error::NonFiniteLoss { .. } | Error::NonFiniteState { .. } | Error::NonFinite(_) => 4,
        _ => 1,
    }
}

fn cmd_run(config_path: &PathBuf) -> Result<()> {
    let mut config = ExperimentConfig::from_path(config_path)?;
    if let Ok(dir) = std::env::var("PROPEN_OUTPUT_DIR") {
        config.output_dir = PathBuf::from(dir);
    }
    let reports = run_experiment(&config)?;
    println!(
        "wrote {} report rows for {} repetitions to {}",
        reports.len(),
        config.repetitions,
        config.output_dir.display()
    );
    Ok(())
}

fn cmd_match(data: &PathBuf, dx: f64, dy: f64, dy_lower: f64) -> Result<()> {
    let set = DesignSet::read_csv(std::fs::File::open(data)?)?;
    let config = MatchConfig::new(dx, dy, dy_lower)?;
    let matched = build_matched_dataset(&set, &config)?;
    if matched.is_empty() {
        return Err(Error::EmptyMatchedDataset);
    }
    let stdout = std::io::stdout();
    matched.write_csv(stdout.lock())?;
    Ok(())
}

fn cmd_optimize(model_path: &PathBuf, seeds_path: &PathBuf, max_steps: usize, eps: f64) -> Result<()> {
    let mlp = Mlp::load(model_path)?;
    if mlp.input_dim() != mlp.output_dim() {
        return Err(Error::DimensionMismatch { expected: mlp.input_dim(), actual: mlp.output_dim() });
    }
    // The saved network is applied as-is: no standardization, design-to-design.
    let model = PropEnModel::from_parts(
        mlp.clone(),
        Standardizer::identity(mlp.input_dim()),
        None,
        PropEnVariant::new(IoMode::X2X, 0.0)?,
    )?;
    let seeds = DesignSet::read_csv(std::fs::File::open(seeds_path)?)?;
    let config = OptimizeConfig::new(max_steps, eps, true)?;
    let mut trajectories = Vec::with_capacity(seeds.len());
    for i in 0..seeds.len() {
        trajectories.push(optimize(&model, seeds.design(i), None, &config, None)?);
    }
    let stdout = std::io::stdout();
    write_trajectories_csv(stdout.lock(), &trajectories, None)?;
    Ok(())
}

fn thm1_records() -> Result<Vec<CheckRecord>> {
    let mut records = Vec::new();
    for d in [2usize, 10] {
        let weights = ndarray::Array1::from_shape_fn(d, |k| 1.0 + k as f64 * 0.1);
        let g = AnalyticProperty::Linear { weights };
        let seed = ndarray::Array1::zeros(d);
        let cosine = thm1_direction_check(&g, seed.view(), 1.0, 10_000, 17)?;
        records.push(CheckRecord {
            check: "improving_direction_cosine".into(),
            instance: format!("linear_d{d}_10k_samples"),
            lhs: cosine,
            rhs: 0.95,
            holds: cosine > 0.95,
        });
    }
    Ok(records)
}

fn thm2_records() -> Result<Vec<CheckRecord>> {
    let mut records = Vec::new();
    // zero-variance case: a single match makes the bound an equality
    let single = DesignSet::new(array![[0.5, 0.0], [0.2, 0.1]], array![0.0, 1.0])?;
    let matched = build_matched_dataset(&single, &MatchConfig::new(10.0, 2.0, 0.0)?)?;
    let kde = KdeModel::fit(array![[0.0, 0.0]], 1.0)?;
    let (lhs, rhs, holds) = thm2_bound_check(&matched, &kde, 0, 0.0)?;
    records.push(CheckRecord {
        check: "density_lower_bound".into(),
        instance: "single_match_equality".into(),
        lhs,
        rhs,
        holds,
    });
    // empirical hold rate over a pinwheel-style matched set
    let toy = propen::datasets::generate_toy(&propen::datasets::ToyConfig::new(
        propen::datasets::ToyFamily::Pinwheel,
        150,
        0.1,
        5,
    )?)?;
    let kde = KdeModel::fit(toy.designs().clone(), 0.2)?;
    let props = (0..toy.len())
        .map(|i| kde.log_density(toy.design(i)))
        .collect::<Result<Vec<_>>>()?;
    let labeled = toy.with_properties(ndarray::Array1::from_vec(props))?;
    let matched = build_matched_dataset(&labeled, &MatchConfig::new(1.0, 1.0, 0.0)?)?;
    let mut held = 0usize;
    let mut total = 0usize;
    for i in 0..labeled.len() {
        if matched.match_indices_of(i)?.is_empty() {
            continue;
        }
        let (_, _, h) = thm2_bound_check(&matched, &kde, i, 0.0)?;
        total += 1;
        held += h as usize;
    }
    let rate = 100.0 * held as f64 / total.max(1) as f64;
    records.push(CheckRecord {
        check: "density_lower_bound".into(),
        instance: format!("pinwheel_hold_rate_over_{total}_seeds"),
        lhs: rate,
        rhs: 90.0,
        holds: rate >= 90.0,
    });
    Ok(records)
}

fn corollary_records() -> Result<Vec<CheckRecord>> {
    let data = DesignSet::new(array![[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]], array![0.0, 0.5, 0.5])?;
    let matched = build_matched_dataset(&data, &MatchConfig::new(10.0, 1.0, 0.0)?)?;
    let betas = [0.0, 0.5, 1.0, 3.0];
    let norms = corollary_step_scaling(&matched, 0, &betas)?;
    let mut records = Vec::new();
    for (beta, norm) in betas.iter().zip(&norms).skip(1) {
        let expected = norms[0] / (1.0 + beta);
        records.push(CheckRecord {
            check: "step_size_scaling".into(),
            instance: format!("beta={beta}"),
            lhs: *norm,
            rhs: expected,
            holds: (norm - expected).abs() <= 1e-12,
        });
    }
    // cross-check the closed form against the hand value at beta = 1
    let f = tabular_minimizer(&matched, 0, 1.0)?;
    records.push(CheckRecord {
        check: "closed_form_minimizer".into(),
        instance: "hand_example_beta=1".into(),
        lhs: f[0],
        rhs: 0.5,
        holds: (f[0] - 0.5).abs() <= 1e-12 && (f[1] - 0.5).abs() <= 1e-12,
    });
    Ok(records)
}

fn cmd_check_theory(which: &str) -> Result<()> {
    let mut records = Vec::new();
    match which {
        "thm1" => records.extend(thm1_records()?),
        "thm2" => records.extend(thm2_records()?),
        "corollary" => records.extend(corollary_records()?),
        "all" => {
            records.extend(thm1_records()?);
            records.extend(thm2_records()?);
            records.extend(corollary_records()?);
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown check '{other}' (expected thm1, thm2, corollary, or all)"
            )))
        }
    }
    let stdout = std::io::stdout();
    write_checks_csv(stdout.lock(), &records)?;
    if records.iter().any(|r| !r.holds) {
        return Err(Error::InvalidConfig("one or more theory checks failed".into()));
    }
    Ok(())
}

fn cmd_naca(m: f64, p: f64, t: f64, n: usize) -> Result<()> {
    let params = NacaParams::new(m, p, t, n)?;
    let coords = generate_naca(&params);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "x,y")?;
    for pair in coords.chunks(2) {
        writeln!(out, "{},{}", pair[0], pair[1])?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Match { data, dx, dy, dy_lower } => cmd_match(&data, dx, dy, dy_lower),
        Command::Optimize { model, seeds, max_steps, eps } => {
            cmd_optimize(&model, &seeds, max_steps, eps)
        }
        Command::CheckTheory { which } => cmd_check_theory(&which),
        Command::Naca { m, p, t, n } => cmd_naca(m, p, t, n),
    }
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
