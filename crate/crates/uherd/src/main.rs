use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

use uherd::config::ExperimentConfig;
use uherd::data;
use uherd::experiment;
use uherd::HarnessError;
use uherding_core::coverage::{error_bound, BoundParams};
use uherding_core::uncertainty::{
    compute_ece, log_spaced_grid, scaled_softmax, select_temperature,
};
use uherding_core::{KernelConfig, PoolState};

#[derive(Parser)]
#[command(
    name = "uherd",
    version,
    about = "Coverage-based active-learning selection, benchmarks, and calibration tools"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a full acquisition experiment from a JSON config and write result CSVs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override the schedule seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output path from the config.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Select one batch for an existing pool and print the chosen indices.
    Select {
        /// Headerless CSV of feature rows.
        #[arg(long)]
        features: PathBuf,
        /// Label file (one class id per line); required for model-based methods.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// File listing currently labeled pool indices, one per line (may be empty).
        #[arg(long)]
        labeled: PathBuf,
        /// Experiment config supplying method, kernel, uncertainty, and model settings.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        budget: usize,
        /// Seed for stochastic methods; defaults to the config's schedule seed, else 0.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Grid-search a calibration temperature and print the per-temperature ECE table.
    Calibrate {
        /// Headerless CSV of logit rows.
        #[arg(long)]
        logits: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = 15)]
        bins: usize,
        #[arg(long, default_value_t = 0.01)]
        grid_min: f64,
        #[arg(long, default_value_t = 100.0)]
        grid_max: f64,
        #[arg(long, default_value_t = 21)]
        grid_count: usize,
    },
    /// Generate a synthetic dataset and write feature/label files.
    GenData {
        #[arg(long, value_enum)]
        kind: DataKind,
        /// Total sample count (halfmoons).
        #[arg(long, default_value_t = 400)]
        n: usize,
        /// Gaussian noise standard deviation (halfmoons).
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        /// Cluster centers as "x,y;x,y;..." (blobs).
        #[arg(long)]
        centers: Option<String>,
        /// Samples per center (blobs).
        #[arg(long, default_value_t = 50)]
        per_center: usize,
        /// Cluster standard deviation (blobs).
        #[arg(long, default_value_t = 0.5)]
        std: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        features_out: PathBuf,
        #[arg(long)]
        labels_out: PathBuf,
    },
    /// Evaluate the coverage-estimation error bound.
    Bound {
        #[arg(long)]
        budget: usize,
        #[arg(long)]
        pool_size: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        norm_bound: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        u_max: f64,
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
    },
    /// Join a method's results with a Random baseline over matching seeds and rounds.
    DeltaAcc {
        /// Results CSV of the method under study.
        #[arg(long)]
        method: PathBuf,
        /// Results CSV of the Random baseline.
        #[arg(long)]
        random: PathBuf,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DataKind {
    Halfmoons,
    Blobs,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = dispatch(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run {
            config,
            seed,
            output,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = seed {
                match cfg.schedule.as_mut() {
                    Some(schedule) => schedule.seed = seed,
                    None => {
                        return Err(HarnessError::Config(
                            "cannot override --seed: config has no schedule".into(),
                        ))
                    }
                }
            }
            let out = experiment::resolve_output(&cfg, output)?;
            let result = experiment::run_experiment(&cfg)?;
            experiment::emit_results(&result, &out)?;
            println!("wrote {}", out.display());
            Ok(())
        }
        Command::Select {
            features,
            labels,
            labeled,
            config,
            budget,
            seed,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let mut pool = data::load_features(&features)?;
            if cfg.kernel.normalize {
                pool = pool.l2_normalized();
            }
            let labeled_indices = data::load_index_file(&labeled)?;
            let (pool_labels, num_classes) = match labels {
                Some(path) => {
                    let y = data::load_labels(&path)?;
                    if y.len() != pool.len() {
                        return Err(HarnessError::Runtime(format!(
                            "{} has {} rows but {} has {} labels",
                            features.display(),
                            pool.len(),
                            path.display(),
                            y.len()
                        )));
                    }
                    let k = y.iter().max().map(|&m| m + 1).unwrap_or(0).max(2);
                    (y, k)
                }
                None => {
                    let method = cfg.method.resolve()?;
                    if method.needs_model() {
                        return Err(HarnessError::Config(format!(
                            "method `{}` trains a classifier and needs --labels",
                            method.name()
                        )));
                    }
                    (vec![0; pool.len()], 2)
                }
            };
            let state = PoolState::new(pool_labels, num_classes)?;
            let state = state
                .mark_labeled(&labeled_indices)
                .map_err(|e| HarnessError::Config(format!("bad labeled index file: {e}")))?;
            if budget > state.unlabeled().len() {
                return Err(HarnessError::Config(format!(
                    "budget {budget} exceeds {} unlabeled points",
                    state.unlabeled().len()
                )));
            }
            let seed = seed
                .or_else(|| cfg.schedule.as_ref().map(|s| s.seed))
                .unwrap_or(0);
            let fallback_sigma =
                match cfg.kernel.sigma_init {
                    Some(sigma) => sigma,
                    None => {
                        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(
                            experiment::stream_seed(seed, 0, "sigma-fallback"),
                        );
                        let median = experiment::median_pair_distance(&pool, &mut rng);
                        if median > 0.0 {
                            median
                        } else {
                            1.0
                        }
                    }
                };
            let ctx = experiment::prepare_round(&pool, &state, &cfg, seed, 0, fallback_sigma)?;
            let batch = experiment::select_batch(&cfg, &ctx, &state, &pool, budget, seed, 0)?;
            for idx in batch {
                println!("{idx}");
            }
            Ok(())
        }
        Command::Calibrate {
            logits,
            labels,
            bins,
            grid_min,
            grid_max,
            grid_count,
        } => {
            let logit_rows = data::load_features(&logits)?;
            let y = data::load_labels(&labels)?;
            if y.len() != logit_rows.len() {
                return Err(HarnessError::Runtime(format!(
                    "{} has {} rows but {} has {} labels",
                    logits.display(),
                    logit_rows.len(),
                    labels.display(),
                    y.len()
                )));
            }
            let grid = log_spaced_grid(grid_min, grid_max, grid_count)?;
            let matrix = logit_rows.matrix();
            let tau_star = select_temperature(matrix, &y, &grid, bins)?;
            println!("tau,ece,is_tau_star");
            for &tau in &grid {
                let preds = scaled_softmax(matrix, tau)?;
                let ece = compute_ece(&preds, &y, bins)?;
                let star = if tau == tau_star { 1 } else { 0 };
                println!("{tau},{ece},{star}");
            }
            Ok(())
        }
        Command::GenData {
            kind,
            n,
            noise,
            centers,
            per_center,
            std,
            seed,
            features_out,
            labels_out,
        } => {
            let (features, labels) = match kind {
                DataKind::Halfmoons => data::generate_halfmoons(n, noise, seed)?,
                DataKind::Blobs => {
                    let spec = centers.ok_or_else(|| {
                        HarnessError::Config("blobs needs --centers \"x,y;x,y\"".into())
                    })?;
                    let centers = parse_centers(&spec)?;
                    data::generate_blobs(&centers, per_center, std, seed)?
                }
            };
            data::write_features(&features_out, &features)?;
            data::write_labels(&labels_out, &labels)?;
            println!(
                "wrote {} samples to {} / {}",
                features.len(),
                features_out.display(),
                labels_out.display()
            );
            Ok(())
        }
        Command::Bound {
            budget,
            pool_size,
            dim,
            norm_bound,
            sigma,
            u_max,
            delta,
        } => {
            let kernel =
                KernelConfig::gaussian(sigma).map_err(|e| HarnessError::Config(e.to_string()))?;
            let params = BoundParams {
                budget,
                pool_size,
                dim,
                norm_bound,
                lipschitz: kernel.lipschitz_bound(),
                u_max,
                delta,
            };
            let value = error_bound(&params).map_err(|e| HarnessError::Config(e.to_string()))?;
            println!("{value}");
            Ok(())
        }
        Command::DeltaAcc {
            method,
            random,
            output,
        } => {
            let method_rows = experiment::read_results(&method)?;
            let random_rows = experiment::read_results(&random)?;
            let joined = experiment::delta_acc(&method_rows, &random_rows)?;
            let csv = experiment::delta_csv(&joined);
            match output {
                Some(path) => {
                    std::fs::write(&path, csv)?;
                    println!("wrote {}", path.display());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn parse_centers(spec: &str) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut centers = Vec::new();
    for (i, chunk) in spec.split(';').enumerate() {
        let mut center = Vec::new();
        for cell in chunk.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| {
                HarnessError::Config(format!("center {} has a bad coordinate: {cell:?}", i + 1))
            })?;
            center.push(v);
        }
        centers.push(center);
    }
    Ok(centers)
}
