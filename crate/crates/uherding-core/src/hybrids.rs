//! Baseline selectors and hybrid-method reductions.
//!
//! Several clustering-based hybrid acquisition methods become instances of the
//! uncertainty-weighted greedy coverage maximizer once their clustering step is
//! replaced by greedy kernel k-medoids:
//!
//! * weighted k-means with weights `U'` is the coverage greedy run with the
//!   thresholded profile `U'(x) * 1[U'(x) >= nu]`, where `nu` keeps the top-M
//!   points ([`thresholded_uncertainty`]);
//! * label-flip interpolation filtering reduces to the coverage greedy with a
//!   binary profile ([`alfamix_uncertainty`]);
//! * prediction-gradient selection corresponds to running the same greedy on
//!   the pairwise function of [`badge_kernel`], which combines the feature
//!   kernel with gradient embeddings `q(x) = onehot(yhat) - p(x)`.
//!
//! Also here: k-center greedy (farthest-point coreset) and uniform random
//! selection, both deterministic given their inputs.

use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::coverage::{greedy_max_gain, uherding_select, CoverageVector, GreedyStrategy};
use crate::error::{Error, Result};
use crate::kernel::{gaussian, KernelConfig};
use crate::matrix::Matrix;
use crate::pool::{FeatureMatrix, PoolState};
use crate::uncertainty::{argmax, Measure, PredictionSet, UncertaintyProfile};

/// The cutoff that keeps the top `keep_count` points of an uncertainty
/// profile. With ties at the threshold more than `keep_count` points qualify;
/// all of them are kept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSpec {
    pub keep_count: usize,
    pub threshold: f64,
}

impl ThresholdSpec {
    /// The threshold is the `keep`-th largest value of `values`.
    pub fn from_values(values: &[f64], keep: usize) -> Result<Self> {
        if keep == 0 || keep > values.len() {
            return Err(Error::InvalidParameter {
                name: "keep",
                reason: "must lie in [1, pool size]",
            });
        }
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(|a, b| b.total_cmp(a));
        Ok(ThresholdSpec {
            keep_count: keep,
            threshold: sorted[keep - 1],
        })
    }
}

/// Zeroes every value below the top-`keep` threshold: `U(x) = U'(x) * 1[U'(x) >= nu]`.
/// Values tied at the threshold are all kept.
pub fn thresholded_uncertainty(
    u_prime: &UncertaintyProfile,
    keep: usize,
) -> Result<UncertaintyProfile> {
    let spec = ThresholdSpec::from_values(u_prime.values(), keep)?;
    let values = u_prime
        .values()
        .iter()
        .map(|&v| if v >= spec.threshold { v } else { 0.0 })
        .collect();
    Ok(UncertaintyProfile::with_parts(
        values,
        Measure::Thresholded,
        u_prime.u_max(),
    ))
}

/// Mean labeled feature vector per class; `None` for classes without a
/// labeled sample.
pub fn class_anchors(features: &FeatureMatrix, state: &PoolState) -> Vec<Option<Vec<f64>>> {
    let d = features.dim();
    let k = state.num_classes();
    let mut sums = vec![vec![0.0; d]; k];
    let mut counts = vec![0usize; k];
    for &i in state.labeled() {
        let class = state.label_of(i);
        counts[class] += 1;
        for (acc, &v) in sums[class].iter_mut().zip(features.row(i)) {
            *acc += v;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(sum, count)| {
            if count == 0 {
                None
            } else {
                Some(sum.into_iter().map(|v| v / count as f64).collect())
            }
        })
        .collect()
}

/// Binary profile marking points whose prediction flips under interpolation
/// toward any class anchor: value 1 iff some class `j` with an anchor and some
/// `alpha` in `alphas` has `classify(alpha * g(x) + (1 - alpha) * anchor_j)`
/// disagree with the point's predicted class. Classes without an anchor
/// contribute nothing.
pub fn alfamix_uncertainty<C>(
    features: &FeatureMatrix,
    preds: &PredictionSet,
    anchors: &[Option<Vec<f64>>],
    alphas: &[f64],
    classify: C,
) -> Result<UncertaintyProfile>
where
    C: Fn(&[f64]) -> usize,
{
    if preds.len() != features.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: preds.len(),
        });
    }
    if anchors.len() != preds.num_classes() {
        return Err(Error::DimensionMismatch {
            expected: preds.num_classes(),
            got: anchors.len(),
        });
    }
    if alphas.is_empty() {
        return Err(Error::EmptyInput("alphas"));
    }
    if alphas.iter().any(|a| !(0.0..1.0).contains(a)) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "interpolation weights must lie in [0, 1)",
        });
    }
    for anchor in anchors.iter().flatten() {
        if anchor.len() != features.dim() {
            return Err(Error::DimensionMismatch {
                expected: features.dim(),
                got: anchor.len(),
            });
        }
    }
    let mut values = Vec::with_capacity(features.len());
    let mut mixed = vec![0.0; features.dim()];
    for i in 0..features.len() {
        let base = preds.predicted_class(i);
        let row = features.row(i);
        let mut flips = false;
        'outer: for anchor in anchors.iter().flatten() {
            for &alpha in alphas {
                for ((m, &x), &a) in mixed.iter_mut().zip(row).zip(anchor) {
                    *m = alpha * x + (1.0 - alpha) * a;
                }
                if classify(&mixed) != base {
                    flips = true;
                    break 'outer;
                }
            }
        }
        values.push(if flips { 1.0 } else { 0.0 });
    }
    Ok(UncertaintyProfile::with_parts(
        values,
        Measure::AlfaMix,
        1.0,
    ))
}

/// Prediction-gradient embeddings `q(x) = onehot(yhat(x)) - p(x)`, the
/// last-layer loss gradient of a softmax classifier at its own prediction.
/// Each row sums to zero and has squared norm `1 - 2 p_yhat + ||p||^2 < 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct BadgeEmbedding {
    q: Matrix,
    sq_norms: Vec<f64>,
}

impl BadgeEmbedding {
    pub fn from_predictions(preds: &PredictionSet) -> Self {
        let predicted: Vec<usize> = (0..preds.len())
            .map(|i| argmax(preds.probability_row(i)))
            .collect();
        Self::from_parts(preds.probabilities(), &predicted)
            .expect("prediction set rows are aligned")
    }

    /// Builds from explicit probabilities and predicted classes, for cases
    /// where the predicted class is not the argmax (e.g. limit constructions
    /// with exactly uniform probabilities).
    pub fn from_parts(probs: &Matrix, predicted: &[usize]) -> Result<Self> {
        if predicted.len() != probs.rows() {
            return Err(Error::DimensionMismatch {
                expected: probs.rows(),
                got: predicted.len(),
            });
        }
        let k = probs.cols();
        if let Some(&bad) = predicted.iter().find(|&&c| c >= k) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                num_classes: k,
            });
        }
        let mut q = Matrix::zeros(probs.rows(), k);
        let mut sq_norms = Vec::with_capacity(probs.rows());
        for (i, &label) in predicted.iter().enumerate() {
            let p = probs.row(i);
            let row = q.row_mut(i);
            let mut sq = 0.0;
            for j in 0..k {
                let v = if j == label { 1.0 - p[j] } else { -p[j] };
                row[j] = v;
                sq += v * v;
            }
            sq_norms.push(sq);
        }
        Ok(BadgeEmbedding { q, sq_norms })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.q.row(i)
    }

    pub fn sq_norm(&self, i: usize) -> f64 {
        self.sq_norms[i]
    }

    pub fn len(&self) -> usize {
        self.q.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.q.rows() == 0
    }
}

/// Pairwise function combining gradient embeddings with the feature kernel:
///
/// `h(i, j) = 2 <q_i, q_j> k(x_i, x_j) - ||q_i||^2 k(x_i, x_i) - ||q_j||^2 k(x_j, x_j)`
///
/// Symmetric, zero on the diagonal, and generally nonpositive.
pub fn badge_kernel(
    xi: usize,
    xj: usize,
    emb: &BadgeEmbedding,
    features: &FeatureMatrix,
    cfg: &KernelConfig,
) -> f64 {
    let mut dot = 0.0;
    for (a, b) in emb.row(xi).iter().zip(emb.row(xj)) {
        dot += a * b;
    }
    let k_ij = gaussian(features.row(xi), features.row(xj), cfg.sigma);
    let k_ii = gaussian(features.row(xi), features.row(xi), cfg.sigma);
    let k_jj = gaussian(features.row(xj), features.row(xj), cfg.sigma);
    2.0 * dot * k_ij - emb.sq_norm(xi) * k_ii - emb.sq_norm(xj) * k_jj
}

/// Greedy max-coverage selection under an arbitrary pairwise kernel with unit
/// weights. With the Gaussian feature kernel this is exactly the unweighted
/// coverage greedy (MaxHerding).
///
/// The kernel may take negative values; with an empty labeled set the first
/// pick therefore maximizes the mean kernel row (the singleton objective)
/// rather than a clamped gain.
pub fn greedy_kernel_kmedoids<K>(
    kernel_fn: K,
    state: &PoolState,
    budget: usize,
    eval_set: &[usize],
) -> Result<Vec<usize>>
where
    K: Fn(usize, usize) -> f64,
{
    if budget > state.unlabeled().len() {
        return Err(Error::BudgetExceedsUnlabeled {
            budget,
            available: state.unlabeled().len(),
        });
    }
    let n = state.len();
    let mut cov = if state.labeled().is_empty() {
        vec![f64::NEG_INFINITY; n]
    } else {
        let mut cov = vec![f64::NEG_INFINITY; n];
        for &l in state.labeled() {
            for (i, slot) in cov.iter_mut().enumerate() {
                let k = kernel_fn(i, l);
                if k > *slot || *slot == f64::NEG_INFINITY {
                    *slot = k;
                }
            }
        }
        cov
    };
    Ok(greedy_max_gain(
        state.unlabeled(),
        eval_set,
        n,
        budget,
        &mut cov,
        &|n, c| kernel_fn(n, c),
        &|_| 1.0,
        GreedyStrategy::FullScan,
    ))
}

/// Farthest-point selection: iteratively adds the unlabeled point with the
/// largest Euclidean distance to the selected-plus-labeled set. With an empty
/// labeled set the first pick is the point farthest from pool index 0 (an
/// arbitrary but fixed seed), after which distances restart from the picks
/// themselves. Ties go to the smallest index.
pub fn kcenter_greedy(
    state: &PoolState,
    features: &FeatureMatrix,
    budget: usize,
) -> Result<Vec<usize>> {
    if budget > state.unlabeled().len() {
        return Err(Error::BudgetExceedsUnlabeled {
            budget,
            available: state.unlabeled().len(),
        });
    }
    let candidates = state.unlabeled();
    let mut taken = vec![false; candidates.len()];
    let mut picks = Vec::with_capacity(budget);
    if budget == 0 {
        return Ok(picks);
    }

    let distance = |a: usize, b: usize| -> f64 {
        let mut sq = 0.0;
        for (x, y) in features.row(a).iter().zip(features.row(b)) {
            let d = x - y;
            sq += d * d;
        }
        libm::sqrt(sq)
    };

    let mut min_dist: Vec<f64>;
    let mut start = 0;
    if state.labeled().is_empty() {
        // distance to the fixed seed decides the first pick only
        let seed_dist: Vec<f64> = candidates.iter().map(|&c| distance(c, 0)).collect();
        let pos = argmax_pos(&seed_dist, &taken);
        taken[pos] = true;
        picks.push(candidates[pos]);
        min_dist = candidates
            .iter()
            .map(|&c| distance(c, candidates[pos]))
            .collect();
        start = 1;
    } else {
        min_dist = candidates
            .iter()
            .map(|&c| {
                let mut best = f64::INFINITY;
                for &l in state.labeled() {
                    let d = distance(c, l);
                    if d < best {
                        best = d;
                    }
                }
                best
            })
            .collect();
    }

    for _ in start..budget {
        let pos = argmax_pos(&min_dist, &taken);
        taken[pos] = true;
        let winner = candidates[pos];
        picks.push(winner);
        for (i, &c) in candidates.iter().enumerate() {
            let d = distance(c, winner);
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
    Ok(picks)
}

fn argmax_pos(values: &[f64], taken: &[bool]) -> usize {
    let mut best = usize::MAX;
    let mut best_value = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if !taken[i] && v > best_value {
            best_value = v;
            best = i;
        }
    }
    best
}

/// Uniform sample of `budget` unlabeled points without replacement,
/// deterministic given the seed.
pub fn random_select(state: &PoolState, budget: usize, seed: u64) -> Result<Vec<usize>> {
    let unlabeled = state.unlabeled();
    if budget > unlabeled.len() {
        return Err(Error::BudgetExceedsUnlabeled {
            budget,
            available: unlabeled.len(),
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let chosen = rand::seq::index::sample(&mut rng, unlabeled.len(), budget);
    Ok(chosen.iter().map(|i| unlabeled[i]).collect())
}

/// Weighted k-means with weights `u_prime`, its clustering replaced by greedy
/// kernel k-medoids: exactly the coverage greedy with the top-`keep`
/// thresholded profile.
#[allow(clippy::too_many_arguments)]
pub fn weighted_kmeans_select(
    state: &PoolState,
    features: &FeatureMatrix,
    cfg: &KernelConfig,
    u_prime: &UncertaintyProfile,
    keep: usize,
    budget: usize,
    eval_set: &[usize],
    strategy: GreedyStrategy,
) -> Result<Vec<usize>> {
    if keep < budget {
        return Err(Error::InvalidParameter {
            name: "keep",
            reason: "must be at least the selection budget",
        });
    }
    let thresholded = thresholded_uncertainty(u_prime, keep)?;
    let cov = CoverageVector::from_labeled(features, cfg, state.labeled());
    let (picks, _) = uherding_select(
        state,
        features,
        cfg,
        &thresholded,
        budget,
        cov,
        eval_set,
        strategy,
    )?;
    Ok(picks)
}
