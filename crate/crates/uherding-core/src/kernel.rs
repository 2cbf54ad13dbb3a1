//! Kernel evaluation on the fixed embedding, radius adaptation, and the
//! kernel Lipschitz constant.
//!
//! The Gaussian kernel `exp(-||a - b||^2 / sigma^2)` is evaluated with a single
//! shared primitive so that batched rows, single values, and coverage updates
//! agree bitwise. The squared distance accumulates in coordinate order, which
//! also makes the kernel exactly symmetric in its arguments.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::pool::FeatureMatrix;

/// Supported kernel families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gaussian,
}

/// Kernel family plus lengthscale. `sigma` must be finite and positive, so any
/// constructed config has a well-defined Lipschitz constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub sigma: f64,
    /// Row-normalize features to unit norm before kerneling. The flag is
    /// carried here for configuration; callers apply
    /// [`FeatureMatrix::l2_normalized`] explicitly.
    pub normalize_features: bool,
}

impl KernelConfig {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !sigma.is_finite() || sigma <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma",
                reason: "lengthscale must be finite and positive",
            });
        }
        Ok(KernelConfig {
            family: KernelFamily::Gaussian,
            sigma,
            normalize_features: false,
        })
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        let mut cfg = KernelConfig::gaussian(sigma)?;
        cfg.normalize_features = self.normalize_features;
        Ok(cfg)
    }

    /// Lipschitz constant of the kernel in its second argument:
    /// `sqrt(2/e) / sigma` for the Gaussian family.
    pub fn lipschitz_bound(&self) -> f64 {
        match self.family {
            KernelFamily::Gaussian => libm::sqrt(2.0 / core::f64::consts::E) / self.sigma,
        }
    }
}

/// The shared evaluation primitive. No argument checking; `kernel_value` is
/// the checked public entry point.
#[inline]
pub(crate) fn gaussian(a: &[f64], b: &[f64], sigma: f64) -> f64 {
    let mut sq = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        sq += d * d;
    }
    libm::exp(-sq / (sigma * sigma))
}

/// Kernel similarity of two feature rows, in `[0, 1]`. Exactly 1 when the rows
/// are identical, symmetric, and strictly decreasing in their distance.
pub fn kernel_value(xi: &[f64], xj: &[f64], cfg: &KernelConfig) -> Result<f64> {
    if xi.len() != xj.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            got: xj.len(),
        });
    }
    Ok(gaussian(xi, xj, cfg.sigma))
}

/// Kernel similarities of every pool row to the candidate row. The entry at
/// `candidate` is exactly 1.
pub fn kernel_row(candidate: usize, pool: &FeatureMatrix, cfg: &KernelConfig) -> Result<Vec<f64>> {
    if candidate >= pool.len() {
        return Err(Error::IndexOutOfRange {
            index: candidate,
            len: pool.len(),
        });
    }
    let cand = pool.row(candidate);
    let mut row = Vec::with_capacity(pool.len());
    for n in 0..pool.len() {
        row.push(gaussian(pool.row(n), cand, cfg.sigma));
    }
    Ok(row)
}

/// Radius heuristic: the minimum pairwise Euclidean distance among the rows
/// addressed by `labeled`. Falls back to `fallback` when fewer than two rows
/// are given or the minimum distance is zero (duplicate rows), where the
/// heuristic is undefined.
pub fn adapt_radius(features: &FeatureMatrix, labeled: &[usize], fallback: f64) -> f64 {
    if labeled.len() < 2 {
        return fallback;
    }
    let mut min_sq = f64::INFINITY;
    for (i, &u) in labeled.iter().enumerate() {
        for &v in &labeled[i + 1..] {
            let mut sq = 0.0;
            for (x, y) in features.row(u).iter().zip(features.row(v).iter()) {
                let d = x - y;
                sq += d * d;
            }
            if sq < min_sq {
                min_sq = sq;
            }
        }
    }
    if min_sq == 0.0 {
        return fallback;
    }
    libm::sqrt(min_sq)
}
