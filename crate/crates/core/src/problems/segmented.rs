//! Sparse regression with an l-infinity correlation loss:
//! `min ||A^T (A x - b)||_inf s.t. ||x||_0 <= k`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex_inner::{LinfNorm, ObjectiveSpec};
use crate::error::{Error, Result};
use crate::linops::{AffineMap, DenseMatrix};
use crate::mpec::SparsityProblem;
use crate::vecops::norm2;

#[derive(Debug, Clone)]
pub struct SegmentedRegressionInstance {
    /// `m x n` with unit-norm columns.
    pub design: DenseMatrix,
    pub observations: Vec<f64>,
    pub true_signal: Vec<f64>,
    pub true_support: Vec<usize>,
    pub sigma_noise: f64,
}

/// Noise level used by [`generate_segmented_regression`].
const DEFAULT_NOISE: f64 = 0.01;

pub fn generate_segmented_regression(n: usize, seed: u64) -> Result<SegmentedRegressionInstance> {
    generate_segmented_regression_with_noise(n, seed, DEFAULT_NOISE)
}

/// `m = n / 8` rows of Gaussian entries, columns normalized; a support of
/// size `min(m, n) / 2` drawn uniformly with standard normal values;
/// `b = A x + sigma * N(0, I)`.
pub fn generate_segmented_regression_with_noise(
    n: usize,
    seed: u64,
    sigma: f64,
) -> Result<SegmentedRegressionInstance> {
    if n < 16 {
        return Err(Error::InvalidInput(format!("n = {n} is below 16")));
    }
    let m = n / 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    for c in cols.iter_mut() {
        let nrm = norm2(c);
        c.iter_mut().for_each(|v| *v /= nrm);
    }
    let mut data = vec![0.0; m * n];
    for (j, c) in cols.iter().enumerate() {
        for (i, v) in c.iter().enumerate() {
            data[i * n + j] = *v;
        }
    }
    let design = DenseMatrix::from_row_major(m, n, data)?;
    let s = m.min(n) / 2;
    let mut support: Vec<usize> = rand::seq::index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let mut x = vec![0.0; n];
    for &i in &support {
        x[i] = rng.sample::<f64, _>(StandardNormal);
    }
    let mut b = vec![0.0; m];
    design.matvec(&x, &mut b);
    if sigma > 0.0 {
        for v in b.iter_mut() {
            *v += sigma * rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(SegmentedRegressionInstance {
        design,
        observations: b,
        true_signal: x,
        true_support: support,
        sigma_noise: sigma,
    })
}

/// Identity constraint map; the loss is `||.||_inf` composed with
/// `x -> (A^T A) x - A^T b`, and `L` is the largest row norm of `A^T A`.
pub fn build_segmented_regression(
    inst: &SegmentedRegressionInstance,
    k: f64,
) -> Result<SparsityProblem> {
    let a = inst.design.to_nalgebra();
    let gram = a.transpose() * &a;
    let n = gram.nrows();
    let atb = a.transpose() * nalgebra::DVector::from_column_slice(&inst.observations);
    let g = DenseMatrix::from_nalgebra(&gram);
    let lipschitz = (0..n).map(|i| norm2(g.row(i))).fold(0.0_f64, f64::max);
    let map = AffineMap::dense(g).with_offset(atb.iter().map(|v| -v).collect())?;
    let obj = ObjectiveSpec::new(n, lipschitz).with_prox(LinfNorm::new(n), map)?;
    SparsityProblem::new(obj, AffineMap::identity(n), k)
}
