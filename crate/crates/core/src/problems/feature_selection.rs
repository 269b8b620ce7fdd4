//! Sparse linear classification `lambda/2 ||x||^2 + sum_i loss(<s_i, x>, y_i)`
//! with `||x||_0 <= k`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex_inner::{HingeLoss, LogisticTerm, ObjectiveSpec, QuadraticTerm};
use crate::error::{check_len, Error, Result};
use crate::linops::{AffineMap, DenseMatrix};
use crate::mpec::SparsityProblem;
use crate::vecops::norm2;

/// Solution-box radius used in the Lipschitz bound of the losses.
pub const DEFAULT_BOX_BOUND: f64 = 1e2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    Logistic,
    Hinge,
}

#[derive(Debug, Clone)]
pub struct FeatureSelectionData {
    /// One sample per row.
    pub features: Arc<DenseMatrix>,
    /// Entries in `{-1, +1}`.
    pub labels: Vec<f64>,
    pub lambda: f64,
}

impl FeatureSelectionData {
    pub fn new(features: DenseMatrix, labels: Vec<f64>, lambda: f64) -> Result<Self> {
        check_len(features.rows(), labels.len())?;
        if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::InvalidInput("labels must be -1 or +1".into()));
        }
        if features.data().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("features must be finite".into()));
        }
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            features: Arc::new(features),
            labels,
            lambda,
        })
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }
}

/// `0.01, 0.06, ..., 0.96`: fractions of `n` for the sparsity sweep.
pub fn fractional_sparsity_grid() -> Vec<f64> {
    (0..20).map(|i| 0.01 + 0.05 * i as f64).collect()
}

/// Identity constraint map. `L = lambda R + sum_i ||s_i||` bounds the
/// Lipschitz constant of either loss on the box of radius `box_bound`.
pub fn build_feature_selection(
    data: &FeatureSelectionData,
    loss: Loss,
    k: f64,
    box_bound: f64,
) -> Result<SparsityProblem> {
    let n = data.dim();
    if !(k >= 0.0 && k < n as f64) {
        return Err(Error::InvalidInput(format!("k = {k} outside [0, {n})")));
    }
    let row_norms: f64 = (0..data.features.rows())
        .map(|i| norm2(data.features.row(i)))
        .sum();
    let lipschitz = data.lambda * box_bound + row_norms;
    let obj = match loss {
        Loss::Logistic => ObjectiveSpec::new(n, lipschitz).with_smooth(LogisticTerm::new(
            data.features.clone(),
            &data.labels,
            data.lambda,
        )?)?,
        Loss::Hinge => {
            let mut rows = Vec::with_capacity(data.features.data().len());
            for (i, y) in data.labels.iter().enumerate() {
                rows.extend(data.features.row(i).iter().map(|s| y * s));
            }
            let margins = DenseMatrix::from_row_major(data.features.rows(), n, rows)?;
            let samples = margins.rows();
            let mut obj = ObjectiveSpec::new(n, lipschitz)
                .with_smooth(QuadraticTerm::shifted_identity(data.lambda, &vec![0.0; n]))?;
            if samples > 0 {
                obj = obj.with_prox(HingeLoss::new(samples), AffineMap::dense(margins))?;
            }
            obj
        }
    };
    SparsityProblem::new(obj, AffineMap::identity(n), k)
}

/// Gaussian features with labels `sign(<s_i, w*> + noise)` for a random
/// `support`-sparse `w*`.
pub fn generate_classification(
    samples: usize,
    n: usize,
    support: usize,
    lambda: f64,
    seed: u64,
) -> Result<FeatureSelectionData> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data: Vec<f64> = (0..samples * n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    let features = DenseMatrix::from_row_major(samples, n, data)?;
    let idx = rand::seq::index::sample(&mut rng, n, support.min(n));
    let mut w = vec![0.0; n];
    for i in idx.iter() {
        w[i] = rng.sample::<f64, _>(StandardNormal);
    }
    let labels = (0..samples)
        .map(|i| {
            let r: f64 = crate::vecops::dot(features.row(i), &w)
                + 0.1 * rng.sample::<f64, _>(StandardNormal);
            if r >= 0.0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    FeatureSelectionData::new(features, labels, lambda)
}
