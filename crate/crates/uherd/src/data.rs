//! Dataset generators and file IO.
//!
//! Feature files are headerless CSV, one sample per row, comma-separated
//! decimal floats. Label files hold one integer per line, aligned with the
//! feature rows. Both are UTF-8 with LF line endings. Parse errors carry
//! 1-based line (and column) positions.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use uherding_core::FeatureMatrix;

use crate::HarnessError;

/// Two interleaved half-circles of radius 1 (the second reflected and shifted
/// to pass between the first and the x-axis), with isotropic Gaussian noise.
/// The first `ceil(n/2)` points are class 0. Deterministic given the seed.
pub fn generate_halfmoons(
    n: usize,
    noise: f64,
    seed: u64,
) -> Result<(FeatureMatrix, Vec<usize>), HarnessError> {
    if n < 2 {
        return Err(HarnessError::Config(
            "halfmoons needs at least 2 samples".into(),
        ));
    }
    if !noise.is_finite() || noise < 0.0 {
        return Err(HarnessError::Config(
            "halfmoons noise must be finite and nonnegative".into(),
        ));
    }
    let n0 = n.div_ceil(2);
    let n1 = n / 2;
    let arc = |count: usize, i: usize| -> f64 {
        if count == 1 {
            0.0
        } else {
            core::f64::consts::PI * i as f64 / (count - 1) as f64
        }
    };
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n0 {
        let t = arc(n0, i);
        rows.push(vec![t.cos(), t.sin()]);
        labels.push(0);
    }
    for i in 0..n1 {
        let t = arc(n1, i);
        rows.push(vec![1.0 - t.cos(), 0.5 - t.sin()]);
        labels.push(1);
    }
    if noise > 0.0 {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise)
            .map_err(|e| HarnessError::Config(format!("halfmoons noise: {e}")))?;
        for row in rows.iter_mut() {
            for v in row.iter_mut() {
                *v += normal.sample(&mut rng);
            }
        }
    }
    let features = FeatureMatrix::from_rows(&rows)
        .map_err(|e| HarnessError::Runtime(format!("halfmoons features: {e}")))?;
    Ok((features, labels))
}

/// Isotropic Gaussian clusters, one per center; the label is the center index.
pub fn generate_blobs(
    centers: &[Vec<f64>],
    per_center: usize,
    std: f64,
    seed: u64,
) -> Result<(FeatureMatrix, Vec<usize>), HarnessError> {
    if centers.is_empty() {
        return Err(HarnessError::Config(
            "blobs needs at least one center".into(),
        ));
    }
    if per_center == 0 {
        return Err(HarnessError::Config(
            "blobs needs at least one sample per center".into(),
        ));
    }
    if !std.is_finite() || std < 0.0 {
        return Err(HarnessError::Config(
            "blobs std must be finite and nonnegative".into(),
        ));
    }
    let dim = centers[0].len();
    if centers.iter().any(|c| c.len() != dim) {
        return Err(HarnessError::Config(
            "blob centers must share one dimension".into(),
        ));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(centers.len() * per_center);
    let mut labels = Vec::with_capacity(centers.len() * per_center);
    for (class, center) in centers.iter().enumerate() {
        for _ in 0..per_center {
            let mut row = center.clone();
            if std > 0.0 {
                let normal = Normal::new(0.0, std)
                    .map_err(|e| HarnessError::Config(format!("blobs std: {e}")))?;
                for v in row.iter_mut() {
                    *v += normal.sample(&mut rng);
                }
            }
            rows.push(row);
            labels.push(class);
        }
    }
    let features = FeatureMatrix::from_rows(&rows)
        .map_err(|e| HarnessError::Runtime(format!("blobs features: {e}")))?;
    Ok((features, labels))
}

/// Parses a headerless CSV of decimal floats.
pub fn load_features(path: &Path) -> Result<FeatureMatrix, HarnessError> {
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, cell) in line.split(',').enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                HarnessError::Runtime(format!(
                    "{}:{}: column {} is not a number: {cell:?}",
                    path.display(),
                    lineno + 1,
                    col + 1
                ))
            })?;
            row.push(value);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(HarnessError::Runtime(format!(
                    "{}:{}: expected {} columns, found {}",
                    path.display(),
                    lineno + 1,
                    w,
                    row.len()
                )))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(HarnessError::Runtime(format!(
            "{}: no feature rows",
            path.display()
        )));
    }
    FeatureMatrix::from_rows(&rows)
        .map_err(|e| HarnessError::Runtime(format!("{}: {e}", path.display())))
}

/// Parses one nonnegative integer per line.
pub fn load_labels(path: &Path) -> Result<Vec<usize>, HarnessError> {
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let label: usize = line.trim().parse().map_err(|_| {
            HarnessError::Runtime(format!(
                "{}:{}: not a class id: {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        labels.push(label);
    }
    if labels.is_empty() {
        return Err(HarnessError::Runtime(format!(
            "{}: no labels",
            path.display()
        )));
    }
    Ok(labels)
}

/// Loads a feature CSV with its aligned label file.
pub fn load_dataset(
    feature_path: &Path,
    label_path: &Path,
) -> Result<(FeatureMatrix, Vec<usize>), HarnessError> {
    let features = load_features(feature_path)?;
    let labels = load_labels(label_path)?;
    if features.len() != labels.len() {
        return Err(HarnessError::Runtime(format!(
            "{} has {} rows but {} has {} labels",
            feature_path.display(),
            features.len(),
            label_path.display(),
            labels.len()
        )));
    }
    Ok((features, labels))
}

/// One pool index per line (for the `select` subcommand's labeled file).
/// An empty file means an empty labeled set.
pub fn load_index_file(path: &Path) -> Result<Vec<usize>, HarnessError> {
    let text = fs::read_to_string(path)
        .map_err(|e| HarnessError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut indices = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let idx: usize = line.trim().parse().map_err(|_| {
            HarnessError::Runtime(format!(
                "{}:{}: not an index: {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        indices.push(idx);
    }
    Ok(indices)
}

pub fn write_features(path: &Path, features: &FeatureMatrix) -> Result<(), HarnessError> {
    let mut out = String::new();
    for i in 0..features.len() {
        let row = features.row(i);
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    write_atomically(path, out.as_bytes())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<(), HarnessError> {
    let mut out = String::new();
    for label in labels {
        out.push_str(&format!("{label}\n"));
    }
    write_atomically(path, out.as_bytes())
}

pub(crate) fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| {
                HarnessError::Runtime(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    let mut file = fs::File::create(path)
        .map_err(|e| HarnessError::Runtime(format!("cannot create {}: {e}", path.display())))?;
    file.write_all(bytes)
        .map_err(|e| HarnessError::Runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}
