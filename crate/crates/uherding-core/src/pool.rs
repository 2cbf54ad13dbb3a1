//! Pool bookkeeping: the fixed embedding table, labeled/unlabeled index sets,
//! and the acquisition schedule.
//!
//! Pool indices are stable integers into the [`FeatureMatrix`] for the life of
//! an experiment. Both index sets are kept sorted so that iteration order, and
//! therefore every downstream tie-break, is deterministic. Oracle labels for
//! the whole pool are loaded up front; the harness only reveals them as points
//! are marked labeled.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// N×d embedding table with a cached row-norm bound.
///
/// Every row's Euclidean norm is at most [`norm_bound`](Self::norm_bound);
/// the constructor computes the bound as the exact maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    data: Matrix,
    norm_bound: f64,
}

impl FeatureMatrix {
    /// Builds from per-row feature vectors. Requires at least one row, at least
    /// one column, equal row lengths, and finite entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let data = Matrix::from_rows(rows)?;
        Self::from_matrix(data)
    }

    pub fn from_matrix(data: Matrix) -> Result<Self> {
        if data.rows() == 0 {
            return Err(Error::EmptyInput("feature matrix"));
        }
        if data.cols() == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "feature dimension must be at least 1",
            });
        }
        if !data.data().iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "feature entries must be finite",
            });
        }
        let norm_bound = max_row_norm(&data);
        Ok(FeatureMatrix { data, norm_bound })
    }

    pub fn len(&self) -> usize {
        self.data.rows()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one row
    }

    pub fn dim(&self) -> usize {
        self.data.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.data.row(i)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.data
    }

    /// Max row Euclidean norm, the `R` of the estimator error bound.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Returns a copy with every row scaled to unit Euclidean norm.
    /// Zero rows are left untouched.
    pub fn l2_normalized(&self) -> Self {
        let mut out = self.data.clone();
        for i in 0..out.rows() {
            let norm = row_norm(out.row(i));
            if norm > 0.0 {
                for v in out.row_mut(i) {
                    *v /= norm;
                }
            }
        }
        let norm_bound = max_row_norm(&out);
        FeatureMatrix {
            data: out,
            norm_bound,
        }
    }
}

fn row_norm(row: &[f64]) -> f64 {
    let mut sq = 0.0;
    for v in row {
        sq += v * v;
    }
    libm::sqrt(sq)
}

fn max_row_norm(m: &Matrix) -> f64 {
    let mut max = 0.0;
    for row in m.iter_rows() {
        let norm = row_norm(row);
        if norm > max {
            max = norm;
        }
    }
    max
}

/// Disjoint labeled/unlabeled index sets over the pool plus oracle labels.
///
/// Mutation happens only through operations returning a new state, so a shared
/// reference can be read concurrently without synchronization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolState {
    labeled: Vec<usize>,
    unlabeled: Vec<usize>,
    labels: Vec<usize>,
    num_classes: usize,
}

impl PoolState {
    /// New state with every pool point unlabeled. `labels` holds the oracle
    /// label of every point; `num_classes` must be at least 2 and every label
    /// must lie in `[0, num_classes)`.
    pub fn new(labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyInput("pool labels"));
        }
        if num_classes < 2 {
            return Err(Error::InvalidParameter {
                name: "num_classes",
                reason: "need at least two classes",
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::LabelOutOfRange {
                label: bad,
                num_classes,
            });
        }
        Ok(PoolState {
            labeled: Vec::new(),
            unlabeled: (0..labels.len()).collect(),
            labels,
            num_classes,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Sorted labeled indices.
    pub fn labeled(&self) -> &[usize] {
        &self.labeled
    }

    /// Sorted unlabeled indices.
    pub fn unlabeled(&self) -> &[usize] {
        &self.unlabeled
    }

    /// Oracle labels for the full pool, aligned with feature rows.
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label_of(&self, index: usize) -> usize {
        self.labels[index]
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn is_unlabeled(&self, index: usize) -> bool {
        self.unlabeled.binary_search(&index).is_ok()
    }

    /// Moves `batch` from the unlabeled to the labeled set, returning the new
    /// state. The batch must consist of distinct, currently unlabeled indices;
    /// an empty batch returns the state unchanged.
    pub fn mark_labeled(&self, batch: &[usize]) -> Result<PoolState> {
        let mut sorted = batch.to_vec();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateIndex(pair[0]));
            }
        }
        for &idx in &sorted {
            if idx >= self.labels.len() {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    len: self.labels.len(),
                });
            }
            if !self.is_unlabeled(idx) {
                return Err(Error::NotUnlabeled(idx));
            }
        }
        let mut labeled = Vec::with_capacity(self.labeled.len() + sorted.len());
        labeled.extend_from_slice(&self.labeled);
        labeled.extend_from_slice(&sorted);
        labeled.sort_unstable();
        let unlabeled = self
            .unlabeled
            .iter()
            .copied()
            .filter(|i| sorted.binary_search(i).is_err())
            .collect();
        Ok(PoolState {
            labeled,
            unlabeled,
            labels: self.labels.clone(),
            num_classes: self.num_classes,
        })
    }
}

/// Number of rounds and per-round query budgets for one experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleConfig {
    pub num_rounds: usize,
    pub budgets: Vec<usize>,
    pub seed: u64,
}

impl ScheduleConfig {
    pub fn new(budgets: Vec<usize>, seed: u64) -> Self {
        ScheduleConfig {
            num_rounds: budgets.len(),
            budgets,
            seed,
        }
    }

    /// Checks feasibility against the initial unlabeled pool size: every
    /// budget at least 1 and the total no larger than `initial_unlabeled`.
    pub fn validate(&self, initial_unlabeled: usize) -> Result<()> {
        if self.num_rounds != self.budgets.len() {
            return Err(Error::InvalidParameter {
                name: "num_rounds",
                reason: "must equal the number of budgets",
            });
        }
        if self.budgets.contains(&0) {
            return Err(Error::InvalidParameter {
                name: "budgets",
                reason: "every round budget must be at least 1",
            });
        }
        let total: usize = self.budgets.iter().sum();
        if total > initial_unlabeled {
            return Err(Error::BudgetExceedsUnlabeled {
                budget: total,
                available: initial_unlabeled,
            });
        }
        Ok(())
    }
}
