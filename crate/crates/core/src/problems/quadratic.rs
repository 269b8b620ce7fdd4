//! Separable quadratic test instances `1/2 (x - c)^T H (x - c)`.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex_inner::{ObjectiveSpec, QuadraticTerm};
use crate::error::Result;
use crate::linops::AffineMap;
use crate::mpec::SparsityProblem;
use crate::vecops::norm2;

/// `1/2 (x - c)^T diag(h) (x - c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticInstance {
    pub center: Vec<f64>,
    /// Diagonal curvature; all ones for the isotropic family.
    pub curvature: Vec<f64>,
}

/// Center entries have distinct magnitudes `j + U(0.1, 0.9)`, `j = 1..n`
/// shuffled, with random signs. `diagonal` draws curvatures in `[0.5, 2]`
/// instead of ones.
pub fn generate_quadratic(n: usize, seed: u64, diagonal: bool) -> QuadraticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<f64> = (1..=n).map(|j| j as f64).collect();
    levels.shuffle(&mut rng);
    let center = levels
        .into_iter()
        .map(|l| {
            let mag = l + rng.random_range(0.1..0.9);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let curvature = (0..n)
        .map(|_| {
            if diagonal {
                rng.random_range(0.5..2.0)
            } else {
                1.0
            }
        })
        .collect();
    QuadraticInstance { center, curvature }
}

/// Isotropic instance with magnitudes `ratio^j * U(1, 1.05)`, `j = 0..n`,
/// shuffled with random signs. With `ratio >= 1.5` every adjacent pair of
/// magnitudes differs by a constant factor, so the best support is never a
/// near tie.
pub fn generate_separated_quadratic(n: usize, seed: u64, ratio: f64) -> QuadraticInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels: Vec<f64> = (0..n).map(|j| ratio.powi(j as i32)).collect();
    levels.shuffle(&mut rng);
    let center = levels
        .into_iter()
        .map(|l| {
            let mag = l * rng.random_range(1.0..1.05);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    QuadraticInstance {
        center,
        curvature: vec![1.0; n],
    }
}

/// Identity constraint map; `L = ||H|| ||c||` bounds the gradient on the
/// segment between the origin and `c`.
pub fn build_quadratic(inst: &QuadraticInstance, k: f64) -> Result<SparsityProblem> {
    let n = inst.center.len();
    let hmax = inst.curvature.iter().cloned().fold(0.0_f64, f64::max);
    let lipschitz = hmax * norm2(&inst.center);
    let isotropic = inst.curvature.iter().all(|&h| h == inst.curvature[0]);
    let term = if isotropic && n > 0 {
        QuadraticTerm::shifted_identity(inst.curvature[0], &inst.center)
    } else {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&inst.curvature));
        let linear: Vec<f64> = (0..n)
            .map(|i| -inst.curvature[i] * inst.center[i])
            .collect();
        let constant: f64 = (0..n)
            .map(|i| 0.5 * inst.curvature[i] * inst.center[i] * inst.center[i])
            .sum();
        QuadraticTerm::dense(h, linear, constant)?
    };
    let obj = ObjectiveSpec::new(n, lipschitz).with_smooth(term)?;
    SparsityProblem::new(obj, AffineMap::identity(n), k)
}
