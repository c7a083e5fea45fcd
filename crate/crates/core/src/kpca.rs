//! Unsupervised classification pipeline: per-circuit feature vectors from
//! outcome statistics, Gaussian-kernel PCA, midrange split, and accuracy
//! scoring against true labels.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::OutcomeMatrix;
use crate::{Error, Result};

/// Per-bit first moment and second central moment, concatenated:
/// `[mean_0..mean_{l-1}, var_0..var_{l-1}]` for an l-bit row width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Build the feature vector of one outcome matrix (needs >= 2 rows).
pub fn build_features(m: &OutcomeMatrix) -> Result<FeatureVector> {
    if m.len() < 2 {
        return Err(Error::InvalidSpec(format!(
            "feature extraction needs at least 2 repetitions, got {}",
            m.len()
        )));
    }
    let reps = m.len() as f64;
    let width = m.width();
    let mut means = vec![0.0; width];
    for row in m.rows() {
        for (j, &b) in row.iter().enumerate() {
            means[j] += f64::from(b);
        }
    }
    for mean in &mut means {
        *mean /= reps;
    }
    let mut vars = vec![0.0; width];
    for row in m.rows() {
        for (j, &b) in row.iter().enumerate() {
            let d = f64::from(b) - means[j];
            vars[j] += d * d;
        }
    }
    for var in &mut vars {
        *var /= reps;
    }
    let mut values = means;
    values.extend(vars);
    Ok(FeatureVector { values })
}

fn squared_distance(a: &FeatureVector, b: &FeatureVector) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum()
}

/// Median-heuristic bandwidth: `gamma = 1 / (d * median ||f_i - f_j||^2)`
/// with d the feature dimension. Falls back to 1 when all distances
/// vanish.
pub fn default_gamma(features: &[FeatureVector]) -> f64 {
    let mut dists = Vec::new();
    for i in 0..features.len() {
        for j in (i + 1)..features.len() {
            dists.push(squared_distance(&features[i], &features[j]));
        }
    }
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_by(f64::total_cmp);
    let median = dists[dists.len() / 2];
    let dim = features.first().map_or(1, FeatureVector::len).max(1);
    if median <= 0.0 {
        1.0
    } else {
        1.0 / (dim as f64 * median)
    }
}

/// Fitted Gaussian-kernel PCA model.
#[derive(Debug, Clone)]
pub struct KernelModel {
    gamma: f64,
    training: Vec<FeatureVector>,
    /// Eigenvectors of the centered kernel scaled by 1/sqrt(lambda)
    /// (only components with positive eigenvalues are kept).
    coefficients: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
    dims: usize,
    row_means: Vec<f64>,
    grand_mean: f64,
}

impl KernelModel {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Number of usable components (min of requested d and kernel rank).
    pub fn rank(&self) -> usize {
        self.coefficients.len().min(self.dims)
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Training-point coordinates: sqrt(lambda_c) v_c[i], i.e.
    /// lambda_c times the 1/sqrt(lambda)-normalized coefficient.
    pub fn training_coordinates(&self) -> Vec<Vec<f64>> {
        (0..self.training.len())
            .map(|i| {
                (0..self.dims)
                    .map(|c| match self.coefficients.get(c) {
                        Some(coef) => self.eigenvalues[c] * coef[i],
                        None => 0.0,
                    })
                    .collect()
            })
            .collect()
    }
}

const EIGENVALUE_FLOOR: f64 = 1e-10;

/// Fit kernel PCA on the training features: build the Gaussian kernel
/// matrix, double-center it, eigendecompose, and retain the top `dims`
/// components with 1/sqrt(lambda)-normalized coefficients.
///
/// Degenerate input (all features identical) yields a rank-0 model whose
/// projections are all zeros.
pub fn fit_kernel_pca(features: &[FeatureVector], gamma: f64, dims: usize) -> Result<KernelModel> {
    let count = features.len();
    if count < 2 {
        return Err(Error::InvalidSpec("kernel PCA needs at least 2 feature vectors".into()));
    }
    if dims == 0 || dims > count {
        return Err(Error::InvalidSpec(format!(
            "projection dimension must lie in 1..={count}, got {dims}"
        )));
    }
    let len = features[0].len();
    if features.iter().any(|f| f.len() != len) {
        return Err(Error::DimensionMismatch("feature vectors differ in length".into()));
    }
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidSpec(format!("gamma must be positive, got {gamma}")));
    }

    let mut k = DMatrix::from_element(count, count, 0.0f64);
    for i in 0..count {
        for j in i..count {
            let v = (-gamma * squared_distance(&features[i], &features[j])).exp();
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    let row_means: Vec<f64> = (0..count).map(|i| k.row(i).sum() / count as f64).collect();
    let grand_mean = row_means.iter().sum::<f64>() / count as f64;
    let mut centered = k.clone();
    for i in 0..count {
        for j in 0..count {
            centered[(i, j)] = k[(i, j)] - row_means[i] - row_means[j] + grand_mean;
        }
    }

    let eigen = centered.symmetric_eigen();
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    // centered kernels are PSD up to round-off
    if eigen.eigenvalues[order[count - 1]] < -1e-8 {
        return Err(Error::Validation(format!(
            "centered kernel has eigenvalue {}",
            eigen.eigenvalues[order[count - 1]]
        )));
    }

    let mut coefficients = Vec::new();
    let mut eigenvalues = Vec::new();
    for &idx in order.iter().take(dims) {
        let lambda = eigen.eigenvalues[idx];
        if lambda <= EIGENVALUE_FLOOR {
            break; // rank exhausted
        }
        let col = eigen.eigenvectors.column(idx);
        // deterministic sign: largest-magnitude entry positive
        let mut pivot = 0usize;
        for i in 0..count {
            if col[i].abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
        coefficients.push(col.iter().map(|v| sign * v / lambda.sqrt()).collect());
        eigenvalues.push(lambda);
    }

    Ok(KernelModel {
        gamma,
        training: features.to_vec(),
        coefficients,
        eigenvalues,
        dims,
        row_means,
        grand_mean,
    })
}

/// Out-of-sample projection of a feature vector onto the model's
/// components. Components beyond the kernel rank project to zero.
pub fn project(model: &KernelModel, f: &FeatureVector) -> Result<Vec<f64>> {
    let count = model.training.len();
    if f.len() != model.training[0].len() {
        return Err(Error::DimensionMismatch("feature length differs from training".into()));
    }
    let k_x: Vec<f64> = model
        .training
        .iter()
        .map(|t| (-model.gamma * squared_distance(t, f)).exp())
        .collect();
    let k_mean = k_x.iter().sum::<f64>() / count as f64;
    let mut out = vec![0.0; model.dims];
    for (c, coef) in model.coefficients.iter().enumerate().take(model.dims) {
        let mut acc = 0.0;
        for i in 0..count {
            let centered = k_x[i] - k_mean - model.row_means[i] + model.grand_mean;
            acc += coef[i] * centered;
        }
        out[c] = acc;
    }
    Ok(out)
}

/// Split 1D coordinates at the midrange `(min + max)/2`; label 1 for the
/// upper side.
pub fn classify_by_split(coords: &[f64]) -> Result<Vec<u8>> {
    if coords.len() < 2 {
        return Err(Error::InvalidSpec("need at least 2 points to split".into()));
    }
    let min = coords.iter().copied().fold(f64::INFINITY, f64::min);
    let max = coords.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Err(Error::Degenerate("all coordinates equal; no split exists".into()));
    }
    let threshold = 0.5 * (min + max);
    Ok(coords.iter().map(|&c| u8::from(c > threshold)).collect())
}

/// Fraction of correctly classified points, maximized over the two
/// label-to-class assignments (unsupervised labels carry no polarity).
pub fn score_accuracy(labels: &[u8], truth: &[u8]) -> Result<f64> {
    if labels.len() != truth.len() {
        return Err(Error::DimensionMismatch("label and truth lengths differ".into()));
    }
    if labels.is_empty() {
        return Err(Error::InvalidSpec("empty label set".into()));
    }
    let matches = labels.iter().zip(truth).filter(|(a, b)| a == b).count();
    let frac = matches as f64 / labels.len() as f64;
    Ok(frac.max(1.0 - frac))
}
