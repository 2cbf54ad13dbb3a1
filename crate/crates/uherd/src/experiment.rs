//! The acquisition loop: per round, calibrate a temperature on a held-out
//! split of the labeled set, adapt the kernel radius to the minimum labeled
//! pairwise distance, score the pool with the configured selector, reveal the
//! selected labels, retrain from scratch, and evaluate on the test set.
//!
//! Everything is deterministic given the experiment seed. Each round draws its
//! randomness from streams keyed by `(seed, round, purpose)`, so extending the
//! schedule never perturbs earlier rounds, and models are always trained from
//! zero-initialized weights (cold start) so no state can leak across rounds.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use uherding_core::coverage::{uherding_select, CoverageVector, GreedyStrategy};
use uherding_core::hybrids::{
    alfamix_uncertainty, badge_kernel, class_anchors, greedy_kernel_kmedoids, kcenter_greedy,
    random_select, weighted_kmeans_select, BadgeEmbedding,
};
use uherding_core::kernel::adapt_radius;
use uherding_core::model::{
    predict_logits, predict_row_class, predict_row_logits, train, ClassifierSpec, TrainedModel,
};
use uherding_core::uncertainty::{
    log_spaced_grid, scaled_softmax, select_temperature, Measure, PredictionSet, UncertaintyProfile,
};
use uherding_core::{FeatureMatrix, KernelConfig, Matrix, PoolState, ScheduleConfig};

use crate::config::{
    DataSpec, EvalSetSpec, ExperimentConfig, InitKind, MeasureSpec, MethodSpec, ModelSpec,
};
use crate::data::{generate_blobs, generate_halfmoons, load_dataset, write_atomically};
use crate::HarnessError;

/// Everything recorded about one acquisition round. `labeled_size` is the
/// size after the round's batch was revealed, and `test_accuracy` comes from
/// a fresh model trained on that labeled set.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    pub labeled_size: usize,
    pub tau_star: f64,
    pub sigma_star: f64,
    pub selected: Vec<usize>,
    pub test_accuracy: f64,
    /// Filled by `delta-acc` post-processing, never by `run_experiment`.
    pub delta_acc_vs_random: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub method: String,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for the RNG stream of one `(experiment seed, round, purpose)` triple.
pub fn stream_seed(seed: u64, round: u64, purpose: &str) -> u64 {
    let mut h = fnv1a64(purpose.as_bytes());
    h ^= seed.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    h = h.rotate_left(17) ^ round.wrapping_mul(0xd6e8_feb8_6659_fd93);
    h.wrapping_mul(0x0000_0100_0000_01b3)
}

fn stream_rng(seed: u64, round: u64, purpose: &str) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(stream_seed(seed, round, purpose))
}

/// Median Euclidean distance over 1000 random ordered pairs of distinct pool
/// points; the default kernel lengthscale before any radius adaptation.
pub fn median_pair_distance(features: &FeatureMatrix, rng: &mut ChaCha20Rng) -> f64 {
    let n = features.len();
    if n < 2 {
        return 1.0;
    }
    let mut distances = Vec::with_capacity(1000);
    for _ in 0..1000 {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let d: f64 = features
            .row(i)
            .iter()
            .zip(features.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        distances.push(d);
    }
    distances.sort_by(|a, b| a.total_cmp(b));
    distances[distances.len() / 2]
}

fn materialize(spec: &DataSpec) -> Result<(FeatureMatrix, Vec<usize>), HarnessError> {
    match spec {
        DataSpec::Halfmoons { n, noise, seed } => generate_halfmoons(*n, *noise, *seed),
        DataSpec::Blobs {
            centers,
            per_center,
            std,
            seed,
        } => generate_blobs(centers, *per_center, *std, *seed),
        DataSpec::Files { features, labels } => load_dataset(features, labels),
    }
}

fn classifier_spec(model: &ModelSpec, seed: u64) -> ClassifierSpec {
    ClassifierSpec {
        poly_degree: model.poly_degree,
        l2_penalty: model.l2,
        learning_rate: model.lr,
        max_epochs: model.max_epochs,
        tol: model.tol,
        seed,
    }
}

fn measure_of(spec: MeasureSpec) -> Measure {
    match spec {
        MeasureSpec::Margin => Measure::Margin,
        MeasureSpec::Entropy => Measure::Entropy,
        MeasureSpec::Confidence => Measure::Confidence,
    }
}

fn logits_for(
    model: &TrainedModel,
    features: &FeatureMatrix,
    indices: &[usize],
) -> Result<Matrix, HarnessError> {
    let rows: Result<Vec<Vec<f64>>, _> = indices
        .iter()
        .map(|&i| predict_row_logits(model, features.row(i)))
        .collect();
    Ok(Matrix::from_rows(&rows?)?)
}

/// Train/validation split of the labeled set. The validation share is
/// `val_fraction`, clamped to at least one point on each side. Stratified by
/// class when every class has at least two labeled points, plain random
/// otherwise.
pub fn split_train_val(
    state: &PoolState,
    val_fraction: f64,
    rng: &mut ChaCha20Rng,
) -> (Vec<usize>, Vec<usize>) {
    let labeled = state.labeled();
    let m = labeled.len();
    debug_assert!(m >= 2);
    let target = ((val_fraction * m as f64).round() as usize).clamp(1, m - 1);

    let k = state.num_classes();
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &i in labeled {
        per_class[state.label_of(i)].push(i);
    }
    let stratifiable = per_class.iter().all(|c| c.len() >= 2);

    let mut val: Vec<usize> = Vec::with_capacity(target);
    if stratifiable {
        for class in per_class.iter_mut() {
            class.shuffle(rng);
        }
        // round-robin over classes, always leaving one training point each
        let mut progressed = true;
        while val.len() < target && progressed {
            progressed = false;
            for class in per_class.iter_mut() {
                if val.len() >= target {
                    break;
                }
                if class.len() > 1 {
                    val.push(class.pop().expect("nonempty"));
                    progressed = true;
                }
            }
        }
    } else {
        let mut shuffled = labeled.to_vec();
        shuffled.shuffle(rng);
        val.extend_from_slice(&shuffled[..target]);
    }
    val.sort_unstable();
    let train = labeled
        .iter()
        .copied()
        .filter(|i| val.binary_search(i).is_err())
        .collect();
    (train, val)
}

/// Per-round adapted parameters and pool predictions.
pub struct RoundContext {
    pub tau_star: f64,
    pub sigma_star: f64,
    pub preds: PredictionSet,
    pub model: Option<TrainedModel>,
}

/// Runs the parameter-adaptation step for the current labeled set: split,
/// train, pick the calibration temperature, adapt the radius, and score the
/// whole pool with the temperature-scaled model.
pub fn prepare_round(
    features: &FeatureMatrix,
    state: &PoolState,
    cfg: &ExperimentConfig,
    exp_seed: u64,
    round: usize,
    fallback_sigma: f64,
) -> Result<RoundContext, HarnessError> {
    let labeled = state.labeled();
    let spec = classifier_spec(&cfg.model, stream_seed(exp_seed, round as u64, "train"));
    let (tau_star, model) = if labeled.len() >= 2 {
        let mut rng = stream_rng(exp_seed, round as u64, "split");
        let (train_idx, val_idx) = split_train_val(state, cfg.uncertainty.val_fraction, &mut rng);
        let model = train(
            features,
            &train_idx,
            state.labels(),
            state.num_classes(),
            &spec,
        )?;
        let val_logits = logits_for(&model, features, &val_idx)?;
        let val_labels: Vec<usize> = val_idx.iter().map(|&i| state.label_of(i)).collect();
        let grid = log_spaced_grid(
            cfg.uncertainty.tau_grid_min,
            cfg.uncertainty.tau_grid_max,
            cfg.uncertainty.tau_grid_count,
        )?;
        let tau = select_temperature(&val_logits, &val_labels, &grid, cfg.uncertainty.ece_bins)?;
        (tau, Some(model))
    } else if labeled.len() == 1 {
        // nothing to hold out; train uncalibrated
        let model = train(
            features,
            labeled,
            state.labels(),
            state.num_classes(),
            &spec,
        )?;
        (1.0, Some(model))
    } else {
        (1.0, None)
    };

    let pool_logits = match &model {
        Some(m) => predict_logits(m, features)?,
        None => Matrix::zeros(features.len(), state.num_classes()),
    };
    let preds = scaled_softmax(&pool_logits, tau_star)?;
    let sigma_star = adapt_radius(features, labeled, fallback_sigma);
    Ok(RoundContext {
        tau_star,
        sigma_star,
        preds,
        model,
    })
}

fn eval_indices(spec: EvalSetSpec, state: &PoolState) -> Vec<usize> {
    match spec {
        EvalSetSpec::Pool => (0..state.len()).collect(),
        EvalSetSpec::Unlabeled => state.unlabeled().to_vec(),
    }
}

/// Top-`budget` unlabeled points by uncertainty, ties to the smaller index.
fn top_by_uncertainty(
    profile: &UncertaintyProfile,
    state: &PoolState,
    budget: usize,
) -> Vec<usize> {
    let mut ranked: Vec<usize> = state.unlabeled().to_vec();
    ranked.sort_by(|&a, &b| {
        profile
            .value(b)
            .total_cmp(&profile.value(a))
            .then_with(|| a.cmp(&b))
    });
    ranked.truncate(budget);
    ranked
}

const ALPHA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Dispatches the configured method for one batch.
pub fn select_batch(
    cfg: &ExperimentConfig,
    ctx: &RoundContext,
    state: &PoolState,
    features: &FeatureMatrix,
    budget: usize,
    exp_seed: u64,
    round: usize,
) -> Result<Vec<usize>, HarnessError> {
    let eval = eval_indices(cfg.selection.eval_set, state);
    let strategy = if cfg.selection.lazy {
        GreedyStrategy::Lazy
    } else {
        GreedyStrategy::FullScan
    };
    let kcfg = KernelConfig::gaussian(ctx.sigma_star)?;
    let measure = measure_of(cfg.uncertainty.measure);

    let coverage_pick = |profile: &UncertaintyProfile| -> Result<Vec<usize>, HarnessError> {
        let cov = CoverageVector::from_labeled(features, &kcfg, state.labeled());
        let (picks, _) = uherding_select(
            state, features, &kcfg, profile, budget, cov, &eval, strategy,
        )?;
        Ok(picks)
    };

    match cfg.method.resolve()? {
        MethodSpec::Random => Ok(random_select(
            state,
            budget,
            stream_seed(exp_seed, round as u64, "random"),
        )?),
        MethodSpec::Confidence => {
            let profile = UncertaintyProfile::from_predictions(&ctx.preds, Measure::Confidence)?;
            Ok(top_by_uncertainty(&profile, state, budget))
        }
        MethodSpec::Margin => {
            let profile = UncertaintyProfile::from_predictions(&ctx.preds, Measure::Margin)?;
            Ok(top_by_uncertainty(&profile, state, budget))
        }
        MethodSpec::Entropy => {
            let profile = UncertaintyProfile::from_predictions(&ctx.preds, Measure::Entropy)?;
            Ok(top_by_uncertainty(&profile, state, budget))
        }
        MethodSpec::Coreset => Ok(kcenter_greedy(state, features, budget)?),
        MethodSpec::Maxherding => {
            coverage_pick(&UncertaintyProfile::constant(features.len(), 1.0)?)
        }
        MethodSpec::Uherding => {
            coverage_pick(&UncertaintyProfile::from_predictions(&ctx.preds, measure)?)
        }
        MethodSpec::WeightedKmeans { keep } => {
            let profile = UncertaintyProfile::from_predictions(&ctx.preds, measure)?;
            Ok(weighted_kmeans_select(
                state, features, &kcfg, &profile, keep, budget, &eval, strategy,
            )?)
        }
        MethodSpec::AlfamixUherding { alpha, alpha_grid } => {
            let profile = match &ctx.model {
                Some(model) => {
                    let anchors = class_anchors(features, state);
                    let alphas: &[f64] = if alpha_grid { &ALPHA_GRID } else { &[alpha] };
                    alfamix_uncertainty(features, &ctx.preds, &anchors, alphas, |row| {
                        predict_row_class(model, row).expect("row from the same pool")
                    })?
                }
                // no classifier yet: nothing can flip
                None => UncertaintyProfile::constant(features.len(), 0.0)?,
            };
            coverage_pick(&profile)
        }
        MethodSpec::BadgeMedoids => {
            let emb = BadgeEmbedding::from_predictions(&ctx.preds);
            Ok(greedy_kernel_kmedoids(
                |i, j| badge_kernel(i, j, &emb, features, &kcfg),
                state,
                budget,
                &eval,
            )?)
        }
    }
}

/// Fraction of argmax-logit predictions matching the labels; argmax ties go
/// to the smallest class id.
pub fn evaluate_accuracy(
    model: &TrainedModel,
    features: &FeatureMatrix,
    labels: &[usize],
) -> Result<f64, HarnessError> {
    if labels.is_empty() || labels.len() != features.len() {
        return Err(HarnessError::Runtime(format!(
            "test set has {} rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    let logits = predict_logits(model, features)?;
    let mut hits = 0usize;
    for (i, &label) in labels.iter().enumerate() {
        let row = logits.row(i);
        let mut best = 0;
        for (j, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = j;
            }
        }
        if best == label {
            hits += 1;
        }
    }
    Ok(hits as f64 / labels.len() as f64)
}

fn initial_labeled(
    state: &PoolState,
    features: &FeatureMatrix,
    cfg: &ExperimentConfig,
    exp_seed: u64,
    fallback_sigma: f64,
) -> Result<Vec<usize>, HarnessError> {
    let size = cfg.init.size;
    if size == 0 {
        return Ok(Vec::new());
    }
    if size > state.len() {
        return Err(HarnessError::Config(format!(
            "init.size {size} exceeds pool size {}",
            state.len()
        )));
    }
    let mut rng = stream_rng(exp_seed, 0, "init");
    match cfg.init.kind {
        InitKind::Random => {
            let mut pool = state.unlabeled().to_vec();
            pool.shuffle(&mut rng);
            pool.truncate(size);
            Ok(pool)
        }
        InitKind::PerClassRandom => {
            let k = state.num_classes();
            let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); k];
            for &i in state.unlabeled() {
                per_class[state.label_of(i)].push(i);
            }
            for class in per_class.iter_mut() {
                class.shuffle(&mut rng);
            }
            let mut picks = Vec::with_capacity(size);
            while picks.len() < size {
                let mut progressed = false;
                for class in per_class.iter_mut() {
                    if picks.len() >= size {
                        break;
                    }
                    if let Some(i) = class.pop() {
                        picks.push(i);
                        progressed = true;
                    }
                }
                if !progressed {
                    break;
                }
            }
            Ok(picks)
        }
        InitKind::Coverage => {
            let kcfg = KernelConfig::gaussian(fallback_sigma)?;
            let ones = UncertaintyProfile::constant(features.len(), 1.0)?;
            let eval = eval_indices(cfg.selection.eval_set, state);
            let (picks, _) = uherding_select(
                state,
                features,
                &kcfg,
                &ones,
                size,
                CoverageVector::zeros(features.len()),
                &eval,
                GreedyStrategy::FullScan,
            )?;
            Ok(picks)
        }
    }
}

/// Runs the full experiment described by `cfg`. Requires the `data`, `test`,
/// and `schedule` sections. Deterministic given the config.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunResult, HarnessError> {
    cfg.validate()?;
    let data_spec = cfg
        .data
        .as_ref()
        .ok_or_else(|| HarnessError::Config("run requires a data section".into()))?;
    let test_spec = cfg
        .test
        .as_ref()
        .ok_or_else(|| HarnessError::Config("run requires a test section".into()))?;
    let schedule_spec = cfg
        .schedule
        .as_ref()
        .ok_or_else(|| HarnessError::Config("run requires a schedule section".into()))?;

    let (mut features, labels) = materialize(data_spec)?;
    let (mut test_features, test_labels) = materialize(test_spec)?;
    if cfg.kernel.normalize {
        features = features.l2_normalized();
        test_features = test_features.l2_normalized();
    }
    if test_features.dim() != features.dim() {
        return Err(HarnessError::Config(format!(
            "pool features have dim {} but test features have dim {}",
            features.dim(),
            test_features.dim()
        )));
    }
    let num_classes = labels
        .iter()
        .chain(test_labels.iter())
        .max()
        .map(|&m| m + 1)
        .unwrap_or(0)
        .max(2);

    let seed = schedule_spec.seed;
    let schedule = ScheduleConfig::new(schedule_spec.budgets.clone(), seed);
    let mut state = PoolState::new(labels, num_classes)?;
    if cfg.init.size > state.len() {
        return Err(HarnessError::Config(format!(
            "init.size {} exceeds pool size {}",
            cfg.init.size,
            state.len()
        )));
    }
    schedule
        .validate(state.len() - cfg.init.size)
        .map_err(|e| HarnessError::Config(format!("infeasible schedule: {e}")))?;

    let fallback_sigma = match cfg.kernel.sigma_init {
        Some(sigma) => sigma,
        None => {
            let mut rng = stream_rng(seed, 0, "sigma-fallback");
            let median = median_pair_distance(&features, &mut rng);
            if median > 0.0 {
                median
            } else {
                1.0
            }
        }
    };

    let init = initial_labeled(&state, &features, cfg, seed, fallback_sigma)?;
    state = state.mark_labeled(&init)?;

    let mut records = Vec::with_capacity(schedule.num_rounds);
    for (round, &budget) in schedule.budgets.iter().enumerate() {
        let ctx = prepare_round(&features, &state, cfg, seed, round, fallback_sigma)?;
        let batch = select_batch(cfg, &ctx, &state, &features, budget, seed, round)?;
        state = state.mark_labeled(&batch)?;

        // cold start: fresh zero-initialized model on the grown labeled set
        let spec = classifier_spec(&cfg.model, stream_seed(seed, round as u64, "eval-train"));
        let model = train(
            &features,
            state.labeled(),
            state.labels(),
            state.num_classes(),
            &spec,
        )?;
        let test_accuracy = evaluate_accuracy(&model, &test_features, &test_labels)?;

        records.push(RoundRecord {
            round,
            labeled_size: state.labeled().len(),
            tau_star: ctx.tau_star,
            sigma_star: ctx.sigma_star,
            selected: batch,
            test_accuracy,
            delta_acc_vs_random: None,
        });
    }
    Ok(RunResult {
        method: cfg.method.resolve()?.name().to_string(),
        seed,
        records,
    })
}

pub const RESULTS_HEADER: &str = "round,labeled_size,method,seed,tau_star,sigma_star,test_accuracy";

/// Writes the per-round CSV plus a sibling `.indices` file holding each
/// round's selected pool indices, space-separated, one round per line.
/// Output is byte-deterministic.
pub fn emit_results(result: &RunResult, path: &Path) -> Result<(), HarnessError> {
    let mut csv = String::from(RESULTS_HEADER);
    csv.push('\n');
    let mut indices = String::new();
    for r in &result.records {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.round,
            r.labeled_size,
            result.method,
            result.seed,
            r.tau_star,
            r.sigma_star,
            r.test_accuracy
        ));
        let mut line = String::new();
        for (i, idx) in r.selected.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&idx.to_string());
        }
        indices.push_str(&line);
        indices.push('\n');
    }
    write_atomically(path, csv.as_bytes())?;
    write_atomically(&path.with_extension("indices"), indices.as_bytes())?;
    Ok(())
}

/// One row of a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub round: usize,
    pub labeled_size: usize,
    pub method: String,
    pub seed: u64,
    pub tau_star: f64,
    pub sigma_star: f64,
    pub test_accuracy: f64,
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == RESULTS_HEADER => {}
        _ => {
            return Err(HarnessError::Runtime(format!(
                "{}: missing results header",
                path.display()
            )))
        }
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(HarnessError::Runtime(format!(
                "{}:{}: expected 7 fields, found {}",
                path.display(),
                lineno + 1,
                fields.len()
            )));
        }
        let parse_err = |what: &str| {
            HarnessError::Runtime(format!("{}:{}: bad {what}", path.display(), lineno + 1))
        };
        rows.push(ResultRow {
            round: fields[0].parse().map_err(|_| parse_err("round"))?,
            labeled_size: fields[1].parse().map_err(|_| parse_err("labeled_size"))?,
            method: fields[2].to_string(),
            seed: fields[3].parse().map_err(|_| parse_err("seed"))?,
            tau_star: fields[4].parse().map_err(|_| parse_err("tau_star"))?,
            sigma_star: fields[5].parse().map_err(|_| parse_err("sigma_star"))?,
            test_accuracy: fields[6].parse().map_err(|_| parse_err("test_accuracy"))?,
        });
    }
    Ok(rows)
}

/// A method row joined with the Random baseline at the same seed and round.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaRow {
    pub round: usize,
    pub labeled_size: usize,
    pub method: String,
    pub seed: u64,
    pub test_accuracy: f64,
    pub random_accuracy: f64,
    pub delta_acc: f64,
}

/// Joins method results with Random-baseline results over `(seed, round)`.
/// Every method row must have a matching baseline row at the same labeled-set
/// size.
pub fn delta_acc(
    method_rows: &[ResultRow],
    random_rows: &[ResultRow],
) -> Result<Vec<DeltaRow>, HarnessError> {
    let mut baseline: BTreeMap<(u64, usize), &ResultRow> = BTreeMap::new();
    for row in random_rows {
        if baseline.insert((row.seed, row.round), row).is_some() {
            return Err(HarnessError::Runtime(format!(
                "duplicate baseline row for seed {} round {}",
                row.seed, row.round
            )));
        }
    }
    let mut out = Vec::with_capacity(method_rows.len());
    for row in method_rows {
        let matched = baseline.get(&(row.seed, row.round)).ok_or_else(|| {
            HarnessError::Runtime(format!(
                "no baseline row for seed {} round {}",
                row.seed, row.round
            ))
        })?;
        if matched.labeled_size != row.labeled_size {
            return Err(HarnessError::Runtime(format!(
                "labeled-set size mismatch at seed {} round {}: {} vs {}",
                row.seed, row.round, row.labeled_size, matched.labeled_size
            )));
        }
        out.push(DeltaRow {
            round: row.round,
            labeled_size: row.labeled_size,
            method: row.method.clone(),
            seed: row.seed,
            test_accuracy: row.test_accuracy,
            random_accuracy: matched.test_accuracy,
            delta_acc: row.test_accuracy - matched.test_accuracy,
        });
    }
    Ok(out)
}

pub const DELTA_HEADER: &str =
    "round,labeled_size,method,seed,test_accuracy,random_accuracy,delta_acc";

pub fn delta_csv(rows: &[DeltaRow]) -> String {
    let mut out = String::from(DELTA_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.round,
            r.labeled_size,
            r.method,
            r.seed,
            r.test_accuracy,
            r.random_accuracy,
            r.delta_acc
        ));
    }
    out
}

/// Resolves the output path for `run`: CLI flag, then config.
pub fn resolve_output(
    cfg: &ExperimentConfig,
    flag: Option<PathBuf>,
) -> Result<PathBuf, HarnessError> {
    flag.or_else(|| cfg.output.clone()).ok_or_else(|| {
        HarnessError::Config("no output path: set `output` in the config or pass --output".into())
    })
}
