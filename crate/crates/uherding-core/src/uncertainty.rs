//! Uncertainty measures, temperature-scaled predictions, expected calibration
//! error, and grid-search temperature selection.
//!
//! All measures are normalized into `[0, 1]` with larger meaning more
//! uncertain: margin is `1 - (p1 - p2)`, confidence is `1 - p1`, and entropy is
//! Shannon entropy divided by `ln K`. Under this convention a uniform predictor
//! has uncertainty exactly 1 for every measure, and the constant-weight limit
//! that reduces uncertainty-weighted coverage to plain coverage holds verbatim.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Temperature-scaled predictions: logits, the temperature that scaled them,
/// and the resulting row-stochastic probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    logits: Matrix,
    temperature: f64,
    probabilities: Matrix,
}

impl PredictionSet {
    pub fn len(&self) -> usize {
        self.logits.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.logits.rows() == 0
    }

    pub fn num_classes(&self) -> usize {
        self.logits.cols()
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn logits(&self) -> &Matrix {
        &self.logits
    }

    pub fn probabilities(&self) -> &Matrix {
        &self.probabilities
    }

    pub fn probability_row(&self, i: usize) -> &[f64] {
        self.probabilities.row(i)
    }

    /// Predicted class of row `i`: argmax probability, ties to the smallest
    /// class id.
    pub fn predicted_class(&self, i: usize) -> usize {
        argmax(self.probabilities.row(i))
    }
}

/// Index of the strictly largest entry; ties break to the smallest index.
pub(crate) fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

/// Softmax of `logits / tau`, row by row. `tau = 1` is the plain softmax and
/// `tau -> inf` drives every row toward uniform.
pub fn scaled_softmax(logits: &Matrix, tau: f64) -> Result<PredictionSet> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tau",
            reason: "temperature must be finite and positive",
        });
    }
    if logits.cols() == 0 {
        return Err(Error::EmptyInput("logit rows"));
    }
    if !logits.data().iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "logits",
            reason: "logits must be finite",
        });
    }
    let mut probs = Matrix::zeros(logits.rows(), logits.cols());
    for i in 0..logits.rows() {
        let row = logits.row(i);
        let mut max = f64::NEG_INFINITY;
        for &v in row {
            let s = v / tau;
            if s > max {
                max = s;
            }
        }
        let out = probs.row_mut(i);
        let mut sum = 0.0;
        for (j, &v) in row.iter().enumerate() {
            let e = libm::exp(v / tau - max);
            out[j] = e;
            sum += e;
        }
        for v in out.iter_mut() {
            *v /= sum;
        }
    }
    Ok(PredictionSet {
        logits: logits.clone(),
        temperature: tau,
        probabilities: probs,
    })
}

/// `1 - (p1 - p2)` where `p1`, `p2` are the two largest entries. 1 on uniform
/// rows, 0 on one-hot rows. Needs at least two classes.
pub fn margin_uncertainty(p: &[f64]) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "probabilities",
            reason: "margin needs at least two classes",
        });
    }
    validate_prob_row(p)?;
    let (mut p1, mut p2) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &v in p {
        if v > p1 {
            p2 = p1;
            p1 = v;
        } else if v > p2 {
            p2 = v;
        }
    }
    Ok(1.0 - (p1 - p2))
}

/// Shannon entropy normalized by `ln K`, with `0 ln 0 = 0`. Returns 0 for a
/// single-class row, where the normalizer is degenerate.
pub fn entropy_uncertainty(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyInput("probability row"));
    }
    validate_prob_row(p)?;
    if p.len() == 1 {
        return Ok(0.0);
    }
    let mut h = 0.0;
    for &v in p {
        if v > 0.0 {
            h -= v * libm::log(v);
        }
    }
    Ok(h / libm::log(p.len() as f64))
}

/// `1 - p1` where `p1` is the largest entry.
pub fn confidence_uncertainty(p: &[f64]) -> Result<f64> {
    if p.is_empty() {
        return Err(Error::EmptyInput("probability row"));
    }
    validate_prob_row(p)?;
    let mut p1 = f64::NEG_INFINITY;
    for &v in p {
        if v > p1 {
            p1 = v;
        }
    }
    Ok(1.0 - p1)
}

fn validate_prob_row(p: &[f64]) -> Result<()> {
    if p.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter {
            name: "probabilities",
            reason: "entries must be finite and nonnegative",
        });
    }
    Ok(())
}

/// Expected calibration error with equal-width confidence bins.
///
/// Confidence is the max predicted probability; a confidence `c` lands in bin
/// `min(floor(c * n_bins), n_bins - 1)`. Empty bins contribute 0 and the
/// result is `sum_b (|bin_b| / M) * |acc_b - conf_b|`, in `[0, 1]`.
pub fn compute_ece(preds: &PredictionSet, labels: &[usize], n_bins: usize) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::EmptyInput("labels"));
    }
    if labels.len() != preds.len() {
        return Err(Error::DimensionMismatch {
            expected: preds.len(),
            got: labels.len(),
        });
    }
    if n_bins == 0 {
        return Err(Error::InvalidParameter {
            name: "n_bins",
            reason: "need at least one bin",
        });
    }
    let num_classes = preds.num_classes();
    if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
        return Err(Error::LabelOutOfRange {
            label: bad,
            num_classes,
        });
    }
    let mut count = vec![0usize; n_bins];
    let mut conf_sum = vec![0.0; n_bins];
    let mut hit_sum = vec![0.0; n_bins];
    for (i, &label) in labels.iter().enumerate() {
        let row = preds.probability_row(i);
        let pred = argmax(row);
        let conf = row[pred];
        let mut bin = (conf * n_bins as f64) as usize;
        if bin >= n_bins {
            bin = n_bins - 1;
        }
        count[bin] += 1;
        conf_sum[bin] += conf;
        hit_sum[bin] += if pred == label { 1.0 } else { 0.0 };
    }
    let m = labels.len() as f64;
    let mut ece = 0.0;
    for b in 0..n_bins {
        if count[b] == 0 {
            continue;
        }
        let nb = count[b] as f64;
        let acc = hit_sum[b] / nb;
        let conf = conf_sum[b] / nb;
        let gap = acc - conf;
        ece += (nb / m) * if gap < 0.0 { -gap } else { gap };
    }
    Ok(ece)
}

/// Grid-search temperature selection: returns the grid element minimizing the
/// calibration error of the scaled predictions on the validation set. Ties
/// break toward the largest temperature.
pub fn select_temperature(
    val_logits: &Matrix,
    val_labels: &[usize],
    grid: &[f64],
    n_bins: usize,
) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::EmptyInput("temperature grid"));
    }
    let mut best: Option<(f64, f64)> = None; // (ece, tau)
    for &tau in grid {
        let preds = scaled_softmax(val_logits, tau)?;
        let ece = compute_ece(&preds, val_labels, n_bins)?;
        best = match best {
            None => Some((ece, tau)),
            Some((be, bt)) if ece < be || (ece == be && tau > bt) => Some((ece, tau)),
            other => other,
        };
    }
    Ok(best.expect("nonempty grid").1)
}

/// `count` log-spaced values from `min` to `max` inclusive.
pub fn log_spaced_grid(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if !min.is_finite() || !max.is_finite() || min <= 0.0 || max < min {
        return Err(Error::InvalidParameter {
            name: "grid range",
            reason: "need 0 < min <= max, both finite",
        });
    }
    if count == 0 {
        return Err(Error::EmptyInput("temperature grid"));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let lo = libm::log10(min);
    let hi = libm::log10(max);
    let mut grid = Vec::with_capacity(count);
    for i in 0..count {
        let t = i as f64 / (count - 1) as f64;
        grid.push(libm::pow(10.0, lo + (hi - lo) * t));
    }
    Ok(grid)
}

/// Which uncertainty function produced a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Margin,
    Entropy,
    Confidence,
    Constant,
    Thresholded,
    AlfaMix,
    Custom,
}

/// Per-point nonnegative uncertainty values with their bound.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyProfile {
    values: Vec<f64>,
    measure: Measure,
    u_max: f64,
}

impl UncertaintyProfile {
    /// Applies a normalized measure to every probability row. The bound is 1.
    pub fn from_predictions(preds: &PredictionSet, measure: Measure) -> Result<Self> {
        let f = match measure {
            Measure::Margin => margin_uncertainty,
            Measure::Entropy => entropy_uncertainty,
            Measure::Confidence => confidence_uncertainty,
            _ => {
                return Err(Error::InvalidParameter {
                    name: "measure",
                    reason: "only margin, entropy, and confidence derive from predictions",
                })
            }
        };
        let mut values = Vec::with_capacity(preds.len());
        for i in 0..preds.len() {
            values.push(f(preds.probability_row(i))?);
        }
        Ok(UncertaintyProfile {
            values,
            measure,
            u_max: 1.0,
        })
    }

    /// All points share the value `c`. With `c = 1` uncertainty-weighted
    /// selection reduces exactly to unweighted coverage selection.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                reason: "constant uncertainty must be finite and nonnegative",
            });
        }
        Ok(UncertaintyProfile {
            values: vec![c; n],
            measure: Measure::Constant,
            u_max: c,
        })
    }

    /// Arbitrary nonnegative values; the bound is their maximum.
    pub fn custom(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter {
                name: "values",
                reason: "uncertainties must be finite and nonnegative",
            });
        }
        let u_max = values.iter().fold(0.0, |acc: f64, &v| acc.max(v));
        Ok(UncertaintyProfile {
            values,
            measure: Measure::Custom,
            u_max,
        })
    }

    pub(crate) fn with_parts(values: Vec<f64>, measure: Measure, u_max: f64) -> Self {
        UncertaintyProfile {
            values,
            measure,
            u_max,
        }
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

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn u_max(&self) -> f64 {
        self.u_max
    }
}
