//! Coverage estimators and their greedy maximizer.
//!
//! The empirical coverage of a selected set is the average over an evaluation
//! set of each point's maximum kernel similarity to the selection, optionally
//! weighted by per-point uncertainty. The weighted estimator is nonnegative,
//! monotone, and submodular, so greedy selection with per-step marginal gains
//! carries the usual `1 - 1/e` guarantee; a brute-force subset oracle is
//! provided for certification on small instances, and `error_bound` evaluates
//! the uniform-convergence bound on the estimation error.
//!
//! The greedy loop keeps a coverage vector `k` with one entry per pool point:
//! the running maximum kernel similarity to everything selected so far. A
//! candidate's gain is then a single pass over the evaluation set,
//! `mean(U_n * max(k(x_n, cand) - k_n, 0))`, and after each pick the vector is
//! updated elementwise. Coverage of the empty set is 0 by convention.
//!
//! Determinism rules used throughout: candidates are scanned in ascending pool
//! order, sums run in fixed index order, and every argmax tie breaks toward the
//! smallest pool index. The lazy-evaluation strategy exploits that gains only
//! shrink as the selection grows and must produce exactly the same picks as the
//! full scan.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::kernel::{gaussian, KernelConfig};
use crate::pool::{FeatureMatrix, PoolState};
use crate::uncertainty::UncertaintyProfile;

/// Per-pool-point running maximum kernel similarity to the selected set.
///
/// Entries are in `[0, 1]` and only ever increase. A fresh vector is all zeros,
/// the empty-max convention.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageVector {
    values: Vec<f64>,
}

impl CoverageVector {
    pub fn zeros(n: usize) -> Self {
        CoverageVector {
            values: vec![0.0; n],
        }
    }

    /// Coverage of the current labeled set: `k_n = max over labeled of
    /// k(x_n, x')`, or 0 everywhere when nothing is labeled.
    pub fn from_labeled(features: &FeatureMatrix, cfg: &KernelConfig, labeled: &[usize]) -> Self {
        let mut cov = CoverageVector::zeros(features.len());
        for &l in labeled {
            let row = features.row(l);
            for n in 0..features.len() {
                let k = gaussian(features.row(n), row, cfg.sigma);
                if k > cov.values[n] {
                    cov.values[n] = k;
                }
            }
        }
        cov
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Elementwise max with a kernel row.
    pub fn update_max(&mut self, row: &[f64]) {
        for (v, &k) in self.values.iter_mut().zip(row.iter()) {
            if k > *v {
                *v = k;
            }
        }
    }
}

/// Unweighted empirical coverage: the mean over `eval_set` of each point's
/// maximum kernel similarity to `selected`. 0 when `selected` is empty.
pub fn gcoverage(
    selected: &[usize],
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    eval_set: &[usize],
) -> f64 {
    if selected.is_empty() || eval_set.is_empty() {
        return 0.0;
    }
    let mut acc = 0.0;
    for &n in eval_set {
        acc += max_kernel_to(selected, features, cfg, n);
    }
    acc / eval_set.len() as f64
}

/// Uncertainty-weighted empirical coverage:
/// `mean over eval_set of U_n * max over selected of k(x_n, x')`.
///
/// `unc` must hold one value per pool point. With unit weights this equals
/// [`gcoverage`] bitwise.
pub fn ucoverage(
    selected: &[usize],
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    unc: &UncertaintyProfile,
    eval_set: &[usize],
) -> Result<f64> {
    if unc.len() != features.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: unc.len(),
        });
    }
    if selected.is_empty() || eval_set.is_empty() {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for &n in eval_set {
        acc += unc.value(n) * max_kernel_to(selected, features, cfg, n);
    }
    Ok(acc / eval_set.len() as f64)
}

fn max_kernel_to(
    selected: &[usize],
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    n: usize,
) -> f64 {
    let row = features.row(n);
    let mut max = f64::NEG_INFINITY;
    for &s in selected {
        let k = gaussian(row, features.row(s), cfg.sigma);
        if k > max {
            max = k;
        }
    }
    max
}

/// Marginal coverage gain of adding `candidate` on top of the selection
/// summarized by `cov`: `mean over eval_set of U_n * max(k(x_n, cand) - k_n, 0)`.
pub fn marginal_gain(
    candidate: usize,
    cov: &CoverageVector,
    unc: &UncertaintyProfile,
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    eval_set: &[usize],
) -> f64 {
    if eval_set.is_empty() {
        return 0.0;
    }
    let cand = features.row(candidate);
    let mut acc = 0.0;
    for &n in eval_set {
        let k = gaussian(features.row(n), cand, cfg.sigma);
        acc += unc.value(n) * (k - cov.values[n]).max(0.0);
    }
    acc / eval_set.len() as f64
}

/// How the greedy loop evaluates candidate gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GreedyStrategy {
    /// Recompute every candidate's gain at every step.
    #[default]
    FullScan,
    /// Priority queue over stale upper bounds; valid because gains are
    /// nonincreasing as the selection grows. Produces identical picks.
    Lazy,
}

/// Greedily selects `budget` unlabeled points by maximal marginal coverage
/// gain, starting from `cov` (which must summarize the current labeled set).
/// Returns the picks in selection order together with the updated vector.
///
/// Per-pick gains are nonincreasing and ties go to the smallest pool index.
#[allow(clippy::too_many_arguments)]
pub fn uherding_select(
    state: &PoolState,
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    unc: &UncertaintyProfile,
    budget: usize,
    cov: CoverageVector,
    eval_set: &[usize],
    strategy: GreedyStrategy,
) -> Result<(Vec<usize>, CoverageVector)> {
    if budget > state.unlabeled().len() {
        return Err(Error::BudgetExceedsUnlabeled {
            budget,
            available: state.unlabeled().len(),
        });
    }
    if unc.len() != features.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: unc.len(),
        });
    }
    if cov.len() != features.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: cov.len(),
        });
    }
    let mut cov = cov;
    let sigma = cfg.sigma;
    let kval = |n: usize, c: usize| gaussian(features.row(n), features.row(c), sigma);
    let weight = |n: usize| unc.value(n);
    let picks = greedy_max_gain(
        state.unlabeled(),
        eval_set,
        features.len(),
        budget,
        &mut cov.values,
        &kval,
        &weight,
        strategy,
    );
    Ok((picks, cov))
}

/// Exact maximizer of the weighted coverage of `labeled ∪ S` over all size-`budget`
/// subsets `S` of the unlabeled set, by enumeration. Ties break to the
/// lexicographically first subset. Guarded against more than 2e6 subsets.
pub fn brute_force_optimal(
    state: &PoolState,
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    unc: &UncertaintyProfile,
    budget: usize,
    eval_set: &[usize],
) -> Result<(Vec<usize>, f64)> {
    const GUARD: u128 = 2_000_000;
    let unlabeled = state.unlabeled();
    if budget > unlabeled.len() {
        return Err(Error::BudgetExceedsUnlabeled {
            budget,
            available: unlabeled.len(),
        });
    }
    let combinations = binomial(unlabeled.len() as u128, budget as u128);
    if combinations > GUARD {
        return Err(Error::SubsetGuardExceeded {
            combinations,
            limit: GUARD,
        });
    }
    if budget == 0 {
        let value = ucoverage(state.labeled(), features, cfg, unc, eval_set)?;
        return Ok((Vec::new(), value));
    }

    let mut positions: Vec<usize> = (0..budget).collect();
    let mut best_subset: Option<Vec<usize>> = None;
    let mut best_value = f64::NEG_INFINITY;
    loop {
        let mut selected: Vec<usize> = state.labeled().to_vec();
        selected.extend(positions.iter().map(|&p| unlabeled[p]));
        let value = ucoverage(&selected, features, cfg, unc, eval_set)?;
        if value > best_value {
            best_value = value;
            best_subset = Some(positions.iter().map(|&p| unlabeled[p]).collect());
        }
        if !next_combination(&mut positions, unlabeled.len()) {
            break;
        }
    }
    Ok((best_subset.expect("at least one subset"), best_value))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Advances `positions` to the next size-k combination of `0..n` in
/// lexicographic order; false when exhausted.
fn next_combination(positions: &mut [usize], n: usize) -> bool {
    let k = positions.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if positions[i] < n - (k - i) {
            positions[i] += 1;
            for j in i + 1..k {
                positions[j] = positions[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Inputs of the uniform-convergence bound on the coverage-estimation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub budget: usize,
    pub pool_size: usize,
    pub dim: usize,
    pub norm_bound: f64,
    pub lipschitz: f64,
    pub u_max: f64,
    pub delta: f64,
}

/// High-probability bound on the worst-case estimation error of the weighted
/// coverage over all size-B selections:
///
/// `U_max * sqrt(B/N) * (8 L + 1/2 * sqrt(d ln(R^2 N / B) + (2/B) ln(2/delta)))`
///
/// Logarithms are natural. Requires `B/N < 16 R^2` and `R^2 N / B >= 1`.
pub fn error_bound(p: &BoundParams) -> Result<f64> {
    if p.budget == 0 {
        return Err(Error::InvalidParameter {
            name: "budget",
            reason: "must be at least 1",
        });
    }
    if p.pool_size < p.budget {
        return Err(Error::InvalidParameter {
            name: "pool_size",
            reason: "must be at least the budget",
        });
    }
    if p.dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "must be at least 1",
        });
    }
    for (name, v, lo) in [
        ("norm_bound", p.norm_bound, 0.0),
        ("lipschitz", p.lipschitz, 0.0),
        ("u_max", p.u_max, 0.0),
    ] {
        if !v.is_finite() || v < lo {
            return Err(Error::InvalidParameter {
                name,
                reason: "must be finite and nonnegative",
            });
        }
    }
    if !p.delta.is_finite() || p.delta <= 0.0 || p.delta >= 1.0 {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: "must lie strictly between 0 and 1",
        });
    }
    let b = p.budget as f64;
    let n = p.pool_size as f64;
    let r2 = p.norm_bound * p.norm_bound;
    if b / n >= 16.0 * r2 {
        return Err(Error::AssumptionViolated("B/N < 16 R^2"));
    }
    if r2 * n / b < 1.0 {
        return Err(Error::AssumptionViolated("R^2 N/B >= 1 (nonnegative log)"));
    }
    let inner = p.dim as f64 * libm::log(r2 * n / b) + (2.0 / b) * libm::log(2.0 / p.delta);
    Ok(p.u_max * libm::sqrt(b / n) * (8.0 * p.lipschitz + 0.5 * libm::sqrt(inner)))
}

/// Shared greedy engine for coverage-style objectives.
///
/// `cov` may contain `NEG_INFINITY` entries to mean "nothing selected yet";
/// in that state a candidate's score is its raw weighted mean kernel row, the
/// objective value of the singleton. That matters for kernels that can be
/// negative (clamping their gains at zero would collapse the first pick into a
/// tie). For nonnegative kernels a zero-initialized `cov` gives bitwise the
/// same scores. Because gains against a `NEG_INFINITY` floor may grow once the
/// floor becomes finite, the lazy strategy falls back to a full scan for the
/// first pick whenever such entries are present.
#[allow(clippy::too_many_arguments)]
pub(crate) fn greedy_max_gain<K, W>(
    candidates: &[usize],
    eval_set: &[usize],
    pool_size: usize,
    budget: usize,
    cov: &mut [f64],
    kval: &K,
    weight: &W,
    strategy: GreedyStrategy,
) -> Vec<usize>
where
    K: Fn(usize, usize) -> f64,
    W: Fn(usize) -> f64,
{
    let mut picks: Vec<usize> = Vec::with_capacity(budget);
    if budget == 0 || eval_set.is_empty() {
        return picks;
    }
    let inv = 1.0 / eval_set.len() as f64;
    let gain = |cand: usize, cov: &[f64]| -> f64 {
        let mut acc = 0.0;
        for &n in eval_set {
            let k = kval(n, cand);
            let kn = cov[n];
            let g = if kn == f64::NEG_INFINITY {
                k
            } else {
                (k - kn).max(0.0)
            };
            acc += weight(n) * g;
        }
        acc * inv
    };
    let update = |winner: usize, cov: &mut [f64]| {
        for (n, slot) in cov.iter_mut().enumerate().take(pool_size) {
            let k = kval(n, winner);
            if k > *slot || *slot == f64::NEG_INFINITY {
                *slot = k;
            }
        }
    };
    let mut taken = vec![false; candidates.len()];
    let full_scan_pick = |taken: &mut [bool], cov: &[f64]| -> usize {
        let mut best_pos = usize::MAX;
        let mut best_gain = f64::NEG_INFINITY;
        for (pos, &cand) in candidates.iter().enumerate() {
            if taken[pos] {
                continue;
            }
            let g = gain(cand, cov);
            if g > best_gain {
                best_gain = g;
                best_pos = pos;
            }
        }
        taken[best_pos] = true;
        best_pos
    };

    match strategy {
        GreedyStrategy::FullScan => {
            for _ in 0..budget {
                let pos = full_scan_pick(&mut taken, cov);
                let winner = candidates[pos];
                picks.push(winner);
                update(winner, cov);
            }
        }
        GreedyStrategy::Lazy => {
            let mut next_pick = 0;
            if cov.contains(&f64::NEG_INFINITY) {
                let pos = full_scan_pick(&mut taken, cov);
                let winner = candidates[pos];
                picks.push(winner);
                update(winner, cov);
                next_pick = 1;
            }
            let mut heap: BinaryHeap<LazyEntry> = candidates
                .iter()
                .enumerate()
                .filter(|(pos, _)| !taken[*pos])
                .map(|(_, &cand)| LazyEntry {
                    gain: gain(cand, cov),
                    index: cand,
                    stamp: next_pick,
                })
                .collect();
            for pick in next_pick..budget {
                let winner = loop {
                    let top = heap.pop().expect("candidates remain within budget");
                    if top.stamp == pick {
                        break top.index;
                    }
                    heap.push(LazyEntry {
                        gain: gain(top.index, cov),
                        index: top.index,
                        stamp: pick,
                    });
                };
                picks.push(winner);
                update(winner, cov);
            }
        }
    }
    picks
}

/// Max-heap entry ordered by gain, then by smaller index first on ties.
struct LazyEntry {
    gain: f64,
    index: usize,
    stamp: usize,
}

impl PartialEq for LazyEntry {
    fn eq(&self, other: &Self) -> bool {
        self.gain == other.gain && self.index == other.index
    }
}

impl Eq for LazyEntry {}

impl PartialOrd for LazyEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LazyEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.gain
            .total_cmp(&other.gain)
            .then_with(|| other.index.cmp(&self.index))
    }
}
