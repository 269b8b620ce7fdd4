//! Binary quadratic labeling `min 1/2 x^T L x + b^T x, x in {0,1}^n`.
//!
//! With `y = 2x - 1 in {-1,+1}^n` the binary constraint becomes
//! `||y - 1||_0 + ||y + 1||_0 <= n`, i.e. `||A y + c||_0 <= n` for
//! `A = [I; I]` and `c = (-1; +1)`. The objective also carries the
//! indicator of `[-1, 1]^n`, which leaves the feasible set unchanged.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex_inner::{BoxIndicator, ObjectiveSpec, QuadraticTerm};
use crate::error::{check_len, Error, Result};
use crate::linops::AffineMap;
use crate::mpec::SparsityProblem;

#[derive(Debug, Clone)]
pub struct MrfInstance {
    pub laplacian: DMatrix<f64>,
    pub unary: Vec<f64>,
    /// Problem over `y in {-1,+1}^n`.
    pub problem: SparsityProblem,
}

impl MrfInstance {
    /// `{0,1}` labels from a `y` iterate by sign (`y > 0` maps to 1).
    pub fn decode(&self, y: &[f64]) -> Vec<u8> {
        y.iter().map(|&v| u8::from(v > 0.0)).collect()
    }

    pub fn encode(&self, labels: &[u8]) -> Vec<f64> {
        labels.iter().map(|&l| 2.0 * l as f64 - 1.0).collect()
    }

    /// `1/2 x^T L x + b^T x` on binary labels.
    pub fn energy(&self, labels: &[u8]) -> f64 {
        let x = DVector::from_iterator(labels.len(), labels.iter().map(|&l| l as f64));
        0.5 * x.dot(&(&self.laplacian * &x)) + x.dot(&DVector::from_column_slice(&self.unary))
    }
}

/// Builds the `{-1,+1}` reformulation; rejects non-PSD `laplacian`.
pub fn build_mrf(laplacian: DMatrix<f64>, unary: Vec<f64>) -> Result<MrfInstance> {
    let n = unary.len();
    check_len(n, laplacian.nrows())?;
    check_len(n, laplacian.ncols())?;
    if n == 0 {
        return Err(Error::InvalidInput("empty labeling problem".into()));
    }
    let ones = DVector::from_element(n, 1.0);
    let l1 = &laplacian * &ones;
    let linear: Vec<f64> = (0..n).map(|i| l1[i] / 4.0 + unary[i] / 2.0).collect();
    let constant = ones.dot(&l1) / 8.0 + unary.iter().sum::<f64>() / 2.0;
    let hessian = &laplacian / 4.0;
    let hnorm = hessian.clone().symmetric_eigenvalues().amax();
    let lin_norm = linear.iter().map(|v| v * v).sum::<f64>().sqrt();
    // gradient bound on the box [-1, 1]^n
    let lipschitz = (hnorm * (n as f64).sqrt() + lin_norm).max(f64::EPSILON);
    let term = QuadraticTerm::dense(hessian, linear, constant)?;
    // every feasible labeling lies in [-1, 1]^n; without the box the
    // quadratic is unbounded along the Laplacian null space
    let obj = ObjectiveSpec::new(n, lipschitz)
        .with_smooth(term)?
        .with_prox(BoxIndicator::new(n, -1.0, 1.0)?, AffineMap::identity(n))?;
    let mut offset = vec![-1.0; n];
    offset.extend(std::iter::repeat_n(1.0, n));
    let map = AffineMap::stacked(vec![AffineMap::identity(n), AffineMap::identity(n)])?
        .with_offset(offset)?;
    let problem = SparsityProblem::new(obj, map, n as f64)?;
    Ok(MrfInstance {
        laplacian,
        unary,
        problem,
    })
}

/// Laplacian of a random graph (edge probability `density`, weights
/// `U(0, 1)`) with standard normal unaries.
pub fn generate_mrf(n: usize, density: f64, seed: u64) -> Result<MrfInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lap = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(density.clamp(0.0, 1.0)) {
                let w: f64 = rng.random_range(0.0..1.0);
                lap[(i, j)] -= w;
                lap[(j, i)] -= w;
                lap[(i, i)] += w;
                lap[(j, j)] += w;
            }
        }
    }
    let unary = (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    build_mrf(lap, unary)
}
