//! Desk-scale trainable classifier: multinomial logistic regression on an
//! optional polynomial feature lift, fit by full-batch gradient descent.
//!
//! Training is deliberately boring so that it is bit-reproducible: weights
//! start at zero, the optimizer is plain gradient descent with a fixed step,
//! and all loops run in index order. Inputs are standardized per coordinate
//! with statistics from the training split (reused at prediction time), since
//! high-degree monomials of raw coordinates overflow quickly.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pool::FeatureMatrix;
use crate::uncertainty::argmax;

/// Hyperparameters of the classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierSpec {
    /// Maximum total degree of the monomial lift; 1 keeps features as-is.
    pub poly_degree: usize,
    /// Coefficient of the `(l2/2) ||W||^2` penalty (bias row included).
    pub l2_penalty: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop when the gradient Frobenius norm drops below this.
    pub tol: f64,
    pub seed: u64,
}

impl ClassifierSpec {
    pub fn new(poly_degree: usize) -> Self {
        ClassifierSpec {
            poly_degree,
            l2_penalty: 1e-4,
            learning_rate: 0.5,
            max_epochs: 5000,
            tol: 1e-6,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.poly_degree == 0 {
            return Err(Error::InvalidParameter {
                name: "poly_degree",
                reason: "must be at least 1",
            });
        }
        if !self.l2_penalty.is_finite() || self.l2_penalty < 0.0 {
            return Err(Error::InvalidParameter {
                name: "l2_penalty",
                reason: "must be finite and nonnegative",
            });
        }
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "learning_rate",
                reason: "must be finite and positive",
            });
        }
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: "must be finite and positive",
            });
        }
        Ok(())
    }
}

/// Per-coordinate affine normalization fitted on the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    fn fit(rows: &[&[f64]]) -> Self {
        let dim = rows[0].len();
        let m = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (acc, &v) in mean.iter_mut().zip(*row) {
                *acc += v;
            }
        }
        for v in mean.iter_mut() {
            *v /= m;
        }
        let mut var = vec![0.0; dim];
        for row in rows {
            for ((acc, &v), &mu) in var.iter_mut().zip(*row).zip(&mean) {
                let d = v - mu;
                *acc += d * d;
            }
        }
        let std = var
            .iter()
            .map(|&v| {
                let s = libm::sqrt(v / m);
                if s > 0.0 {
                    s
                } else {
                    1.0 // constant coordinate: leave it centered but unscaled
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    fn apply(&self, row: &[f64], out: &mut Vec<f64>) {
        out.clear();
        for ((&v, &mu), &s) in row.iter().zip(&self.mean).zip(&self.std) {
            out.push((v - mu) / s);
        }
    }
}

/// All monomial exponent vectors of total degree 1..=degree over `dim`
/// coordinates, graded lexicographic: degree 1 first, ties by exponent of the
/// first coordinate descending. No constant term; the bias is a model weight.
fn monomial_exponents(dim: usize, degree: usize) -> Vec<Vec<u32>> {
    fn fill(remaining: u32, slot: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == current.len() {
            current[slot] = remaining;
            out.push(current.clone());
            return;
        }
        let mut e = remaining;
        loop {
            current[slot] = e;
            fill(remaining - e, slot + 1, current, out);
            if e == 0 {
                break;
            }
            e -= 1;
        }
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    for total in 1..=degree as u32 {
        fill(total, 0, &mut current, &mut out);
    }
    out
}

/// All monomials of the coordinates of total degree 1..=degree, in graded
/// lexicographic order. Degree 1 returns the row unchanged.
pub fn polynomial_lift(row: &[f64], degree: usize) -> Result<Vec<f64>> {
    if degree == 0 {
        return Err(Error::InvalidParameter {
            name: "degree",
            reason: "must be at least 1",
        });
    }
    let exponents = monomial_exponents(row.len(), degree);
    Ok(lift_with(&exponents, row))
}

fn lift_with(exponents: &[Vec<u32>], row: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(exponents.len());
    for exps in exponents {
        let mut v = 1.0;
        for (&x, &e) in row.iter().zip(exps) {
            for _ in 0..e {
                v *= x;
            }
        }
        out.push(v);
    }
    out
}

/// A fitted classifier: weight matrix over the lifted features (last row is
/// the bias), the spec it was trained with, the final regularized training
/// loss, and the standardization statistics needed at prediction time.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    weights: Matrix,
    spec: ClassifierSpec,
    train_loss: f64,
    scaler: Standardizer,
    exponents: Vec<Vec<u32>>,
    input_dim: usize,
    num_classes: usize,
}

impl TrainedModel {
    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn spec(&self) -> &ClassifierSpec {
        &self.spec
    }

    pub fn train_loss(&self) -> f64 {
        self.train_loss
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }
}

/// Trains on the pool rows addressed by `indices` with the full-pool `labels`.
/// Deterministic: zero-initialized weights, full-batch gradient descent on the
/// mean softmax cross-entropy plus `(l2/2) ||W||^2`, stopping at `max_epochs`
/// or when the gradient norm falls below `tol`.
pub fn train(
    features: &FeatureMatrix,
    indices: &[usize],
    labels: &[usize],
    num_classes: usize,
    spec: &ClassifierSpec,
) -> Result<TrainedModel> {
    spec.validate()?;
    if indices.is_empty() {
        return Err(Error::EmptyInput("training indices"));
    }
    if labels.len() != features.len() {
        return Err(Error::DimensionMismatch {
            expected: features.len(),
            got: labels.len(),
        });
    }
    if num_classes < 2 {
        return Err(Error::InvalidParameter {
            name: "num_classes",
            reason: "need at least two classes",
        });
    }
    for &i in indices {
        if i >= features.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: features.len(),
            });
        }
        if labels[i] >= num_classes {
            return Err(Error::LabelOutOfRange {
                label: labels[i],
                num_classes,
            });
        }
    }

    let raw: Vec<&[f64]> = indices.iter().map(|&i| features.row(i)).collect();
    let scaler = Standardizer::fit(&raw);
    let exponents = monomial_exponents(features.dim(), spec.poly_degree);
    let mut scaled = Vec::new();
    let lifted: Vec<Vec<f64>> = raw
        .iter()
        .map(|row| {
            scaler.apply(row, &mut scaled);
            lift_with(&exponents, &scaled)
        })
        .collect();
    let y: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();

    let (weights, train_loss) = fit_gd(&lifted, &y, num_classes, spec, None);
    Ok(TrainedModel {
        weights,
        spec: *spec,
        train_loss,
        scaler,
        exponents,
        input_dim: features.dim(),
        num_classes,
    })
}

/// Gradient descent core. `loss_trace`, when given, records the regularized
/// loss before every update.
fn fit_gd(
    lifted: &[Vec<f64>],
    y: &[usize],
    num_classes: usize,
    spec: &ClassifierSpec,
    mut loss_trace: Option<&mut Vec<f64>>,
) -> (Matrix, f64) {
    let m = lifted.len();
    let dim = lifted[0].len();
    let mut weights = Matrix::zeros(dim + 1, num_classes);
    let mut probs = vec![0.0; num_classes];
    let mut grad = Matrix::zeros(dim + 1, num_classes);
    let inv_m = 1.0 / m as f64;

    for _ in 0..spec.max_epochs {
        if let Some(trace) = loss_trace.as_deref_mut() {
            trace.push(loss_of(&weights, lifted, y, spec.l2_penalty));
        }
        // gradient of the mean cross-entropy
        for r in 0..dim + 1 {
            for v in grad.row_mut(r).iter_mut() {
                *v = 0.0;
            }
        }
        for (x, &label) in lifted.iter().zip(y) {
            softmax_into(&weights, x, &mut probs);
            for (k, &p) in probs.iter().enumerate() {
                let delta = (p - if k == label { 1.0 } else { 0.0 }) * inv_m;
                for (l, &xv) in x.iter().enumerate() {
                    let g = grad.get(l, k) + xv * delta;
                    grad.set(l, k, g);
                }
                let g = grad.get(dim, k) + delta;
                grad.set(dim, k, g);
            }
        }
        // ridge term, bias row included
        let mut norm_sq = 0.0;
        for l in 0..dim + 1 {
            for k in 0..num_classes {
                let g = grad.get(l, k) + spec.l2_penalty * weights.get(l, k);
                grad.set(l, k, g);
                norm_sq += g * g;
            }
        }
        if libm::sqrt(norm_sq) < spec.tol {
            break;
        }
        for l in 0..dim + 1 {
            for k in 0..num_classes {
                weights.set(
                    l,
                    k,
                    weights.get(l, k) - spec.learning_rate * grad.get(l, k),
                );
            }
        }
    }
    let final_loss = loss_of(&weights, lifted, y, spec.l2_penalty);
    (weights, final_loss)
}

fn softmax_into(weights: &Matrix, x: &[f64], out: &mut [f64]) {
    let num_classes = weights.cols();
    let dim = weights.rows() - 1;
    let mut max = f64::NEG_INFINITY;
    for (k, slot) in out.iter_mut().enumerate() {
        let mut z = weights.get(dim, k);
        for (l, &xv) in x.iter().enumerate() {
            z += xv * weights.get(l, k);
        }
        *slot = z;
        if z > max {
            max = z;
        }
    }
    let mut sum = 0.0;
    for slot in out.iter_mut() {
        *slot = libm::exp(*slot - max);
        sum += *slot;
    }
    for slot in out.iter_mut() {
        *slot /= sum;
    }
    let _ = num_classes;
}

fn loss_of(weights: &Matrix, lifted: &[Vec<f64>], y: &[usize], l2: f64) -> f64 {
    let num_classes = weights.cols();
    let mut probs = vec![0.0; num_classes];
    let mut nll = 0.0;
    for (x, &label) in lifted.iter().zip(y) {
        softmax_into(weights, x, &mut probs);
        nll -= libm::log(probs[label].max(1e-300));
    }
    let mut norm_sq = 0.0;
    for &w in weights.data() {
        norm_sq += w * w;
    }
    nll / lifted.len() as f64 + 0.5 * l2 * norm_sq
}

/// Logits for every row of `features` under the trained pipeline
/// (standardize, lift, affine map). Rows are independent of one another.
pub fn predict_logits(model: &TrainedModel, features: &FeatureMatrix) -> Result<Matrix> {
    if features.dim() != model.input_dim {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim,
            got: features.dim(),
        });
    }
    let mut out = Matrix::zeros(features.len(), model.num_classes);
    let mut scaled = Vec::new();
    for i in 0..features.len() {
        model.scaler.apply(features.row(i), &mut scaled);
        let lifted = lift_with(&model.exponents, &scaled);
        let row = out.row_mut(i);
        for (k, slot) in row.iter_mut().enumerate() {
            let mut z = model.weights.get(model.weights.rows() - 1, k);
            for (l, &xv) in lifted.iter().enumerate() {
                z += xv * model.weights.get(l, k);
            }
            *slot = z;
        }
    }
    Ok(out)
}

/// Logits for a single raw feature row.
pub fn predict_row_logits(model: &TrainedModel, row: &[f64]) -> Result<Vec<f64>> {
    if row.len() != model.input_dim {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim,
            got: row.len(),
        });
    }
    let mut scaled = Vec::new();
    model.scaler.apply(row, &mut scaled);
    let lifted = lift_with(&model.exponents, &scaled);
    let mut out = Vec::with_capacity(model.num_classes);
    for k in 0..model.num_classes {
        let mut z = model.weights.get(model.weights.rows() - 1, k);
        for (l, &xv) in lifted.iter().enumerate() {
            z += xv * model.weights.get(l, k);
        }
        out.push(z);
    }
    Ok(out)
}

/// Predicted class for a single raw feature row (argmax logit, smallest class
/// id on ties).
pub fn predict_row_class(model: &TrainedModel, row: &[f64]) -> Result<usize> {
    Ok(argmax(&predict_row_logits(model, row)?))
}
