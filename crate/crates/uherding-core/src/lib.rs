//! Coverage-driven point selection for pool-based active learning.
//!
//! The crate implements uncertainty coverage: the expected, uncertainty-weighted
//! maximum kernel similarity from a random pool point to a selected set. Greedily
//! maximizing its empirical estimate (UHerding) interpolates between pure
//! representation-based selection (MaxHerding, the unit-weight special case) and
//! pure uncertainty sampling, with two adaptive parameters:
//!
//! * a softmax temperature, chosen per round to minimize expected calibration
//!   error on a held-out split, which flattens uncertainties while the model is
//!   poor and sharpens them as it improves;
//! * a kernel lengthscale, set to the minimum pairwise distance among labeled
//!   points, which shrinks coverage toward pure uncertainty as labels accumulate.
//!
//! Alongside the estimator and its greedy maximizer the crate provides a
//! brute-force subset oracle for certification, an evaluator for the
//! uniform-convergence error bound of the estimator, classic baselines
//! (random, confidence, margin, entropy, k-center greedy), hybrid-method
//! reductions (thresholded weights, label-flip interpolation profiles, the
//! prediction-gradient kernel), and a deterministic multinomial logistic
//! regression with polynomial feature lift for desk-scale experiments.
//!
//! Everything is `no_std` + `alloc`; transcendentals go through `libm` so that
//! results are bit-identical across platforms. All argmax ties break toward the
//! smallest pool index and all reductions run in fixed index order, making every
//! selection reproducible.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod coverage;
pub mod error;
pub mod hybrids;
pub mod kernel;
pub mod matrix;
pub mod model;
pub mod pool;
pub mod uncertainty;

pub use coverage::{
    brute_force_optimal, error_bound, gcoverage, marginal_gain, ucoverage, uherding_select,
    BoundParams, CoverageVector, GreedyStrategy,
};
pub use error::{Error, Result};
pub use kernel::{adapt_radius, kernel_row, kernel_value, KernelConfig, KernelFamily};
pub use matrix::Matrix;
pub use model::{polynomial_lift, predict_logits, train, ClassifierSpec, TrainedModel};
pub use pool::{FeatureMatrix, PoolState, ScheduleConfig};
pub use uncertainty::{
    compute_ece, confidence_uncertainty, entropy_uncertainty, margin_uncertainty, scaled_softmax,
    select_temperature, Measure, PredictionSet, UncertaintyProfile,
};
