//! Equilibrium-constrained solvers for `min f(x) s.t. ||Ax + b||_0 <= k`.
//!
//! The cardinality constraint is equivalent to a complementarity system:
//! either `||z||_1 = <z, u>` for some `u` in `{-1 <= u <= 1, ||u||_1 <= k}`
//! (non-separable form, used by [`epm_solve`]) or `|z| * v = 0` for some `v`
//! in `{0 <= v <= 1, <1, 1 - v> <= k}` (separable form, used by
//! [`adm_solve`]).

mod adm;
mod epm;
mod kkt;

pub use adm::{adm_solve, adm_solve_observed, AdmState};
pub use epm::{epm_solve, epm_solve_observed, penalty_update_bound, EpmState};
pub use kkt::{kkt_residuals, KktResiduals, SolverState};

use std::time::Instant;

use crate::convex_inner::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::linops::{AffineMap, SpectralEstimate};
use crate::vecops::count_nonzeros;

/// `min f(x) s.t. ||A x + b||_0 <= k`.
#[derive(Debug, Clone)]
pub struct SparsityProblem {
    pub objective: ObjectiveSpec,
    pub constraint_map: AffineMap,
    pub k: f64,
    /// Known smallest singular value of `A`; skips estimation.
    pub sigma_override: Option<f64>,
}

impl SparsityProblem {
    /// Validates dimensions and `0 <= k <= m`.
    pub fn new(objective: ObjectiveSpec, constraint_map: AffineMap, k: f64) -> Result<Self> {
        if objective.dim() != constraint_map.cols() {
            return Err(Error::DimensionMismatch {
                expected: constraint_map.cols(),
                got: objective.dim(),
            });
        }
        let m = constraint_map.rows() as f64;
        if !(k >= 0.0 && k <= m) {
            return Err(Error::InvalidInput(format!(
                "sparsity level {k} outside [0, {m}]"
            )));
        }
        Ok(Self {
            objective,
            constraint_map,
            k,
            sigma_override: None,
        })
    }

    pub fn with_sigma_override(mut self, sigma: f64) -> Self {
        self.sigma_override = Some(sigma);
        self
    }

    pub fn dim(&self) -> usize {
        self.constraint_map.cols()
    }

    /// `||A x + b||_0` at the library counting threshold.
    pub fn l0(&self, x: &[f64]) -> usize {
        count_nonzeros(&self.constraint_map.apply(x).expect("dimension checked"))
    }

    /// `k` as an integer cardinality (floor).
    pub fn k_count(&self) -> usize {
        self.k.floor() as usize
    }
}

/// Tunables shared by both MPEC solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial exact-penalty weight.
    pub rho0: f64,
    /// Proximal weight on `x` (and `u`/`v`) updates.
    pub mu: f64,
    /// Augmented-Lagrangian penalty of the alternating direction method.
    pub alpha: f64,
    /// Initial multiplier value.
    pub eta: f64,
    /// Penalty doubling cadence.
    pub penalty_cadence: usize,
    pub eps_gap: f64,
    pub eps_x: f64,
    pub max_outer: usize,
    /// Penalty cap used when `A` is rank deficient and no sigma is supplied.
    pub rho_max: f64,
    pub sigma_tol: f64,
    pub inner_tol: f64,
    pub inner_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho0: 0.01,
            mu: 0.01,
            alpha: 0.01,
            eta: 0.01,
            penalty_cadence: 30,
            eps_gap: 1e-6,
            eps_x: 1e-6,
            max_outer: 500,
            rho_max: 1e4,
            sigma_tol: 1e-6,
            inner_tol: crate::convex_inner::DEFAULT_INNER_TOL,
            inner_max_iter: crate::convex_inner::DEFAULT_INNER_MAX_ITER,
        }
    }
}

/// One row of a solver trace.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub objective: f64,
    pub gap: f64,
    /// `rho` for penalty methods, `max(pi)` for the multiplier method.
    pub penalty: f64,
    pub wall_ms: f64,
}

/// Final iterate and certificates of a solve.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub x_final: Vec<f64>,
    pub objective_value: f64,
    pub l0_achieved: usize,
    pub complementarity_gap: f64,
    pub outer_iterations: usize,
    pub converged: bool,
    /// Final `rho` (penalty methods) or `max(pi)`.
    pub final_penalty: f64,
    /// Number of strict penalty increases.
    pub penalty_updates: usize,
    /// Running maximum of `||x^t||`.
    pub max_x_norm: f64,
    /// Largest violation of the augmented-Lagrangian descent inequality
    /// (alternating direction method only).
    pub max_descent_violation: Option<f64>,
    /// Penalty cap in force (exact penalty method only).
    pub rho_cap: Option<f64>,
    pub spectral: Option<SpectralEstimate>,
    pub trace: Vec<TraceRecord>,
}

/// Tracks wall time for trace records.
#[derive(Debug)]
pub(crate) struct Clock(Instant);

impl Clock {
    pub(crate) fn start() -> Self {
        Self(Instant::now())
    }

    pub(crate) fn ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

/// Relative change `||a - b|| / (1 + ||b||)`.
pub(crate) fn rel_change(a: &[f64], b: &[f64]) -> f64 {
    crate::vecops::dist2(a, b) / (1.0 + crate::vecops::norm2(b))
}

pub(crate) fn validate_config(config: &SolverConfig) -> Result<()> {
    let positive = [
        ("rho0", config.rho0),
        ("mu", config.mu),
        ("alpha", config.alpha),
        ("eta", config.eta),
        ("rho_max", config.rho_max),
    ];
    for (name, v) in positive {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "{name} must be positive, got {v}"
            )));
        }
    }
    if config.penalty_cadence == 0 || config.max_outer == 0 {
        return Err(Error::InvalidInput(
            "penalty cadence and max_outer must be positive".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::sign;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = rng.random_range(1..=8);
        (0..n).map(|_| rng.random_range(-2..=2) as f64).collect()
    }

    #[test]
    fn sign_vector_certifies_cardinality() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = random_sparse(&mut rng);
            let u: Vec<f64> = x.iter().map(|&v| sign(v)).collect();
            let l0 = x.iter().filter(|v| **v != 0.0).count();
            assert_eq!(crate::vecops::norm1(&u) as usize, l0);
            assert_eq!(crate::vecops::norm1(&x), crate::vecops::dot(&u, &x));
        }
    }

    #[test]
    fn indicator_vector_certifies_cardinality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = random_sparse(&mut rng);
            let v: Vec<f64> = x.iter().map(|&xi| 1.0 - sign(xi.abs())).collect();
            let l0 = x.iter().filter(|v| **v != 0.0).count();
            assert_eq!(v.iter().map(|vi| 1.0 - vi).sum::<f64>() as usize, l0);
            assert!(v.iter().zip(&x).all(|(vi, xi)| vi * xi.abs() == 0.0));
        }
    }

    #[test]
    fn problem_rejects_bad_k() {
        let obj = ObjectiveSpec::new(3, 1.0);
        assert!(SparsityProblem::new(obj.clone(), AffineMap::identity(3), 4.0).is_err());
        assert!(SparsityProblem::new(obj.clone(), AffineMap::identity(3), -1.0).is_err());
        assert!(SparsityProblem::new(obj, AffineMap::identity(2), 1.0).is_err());
    }

    fn toy() -> SparsityProblem {
        use crate::convex_inner::QuadraticTerm;
        let c = [5.0, 0.1];
        let obj = ObjectiveSpec::new(2, crate::vecops::norm2(&c))
            .with_smooth(QuadraticTerm::shifted_identity(1.0, &c))
            .unwrap();
        SparsityProblem::new(obj, AffineMap::identity(2), 1.0).unwrap()
    }

    #[test]
    fn epm_finds_best_one_sparse_point() {
        let r = epm_solve(&toy(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!(
            (r.x_final[0] - 5.0).abs() < 1e-6 && r.x_final[1] == 0.0,
            "{:?}",
            r.x_final
        );
        assert!(r.complementarity_gap <= 1e-6);
        assert!(r.final_penalty <= r.rho_cap.unwrap());
    }

    #[test]
    fn adm_finds_best_one_sparse_point() {
        let cfg = SolverConfig {
            max_outer: 5000,
            ..SolverConfig::default()
        };
        let r = adm_solve(&toy(), &cfg).unwrap();
        assert!(r.converged, "{} iterations", r.outer_iterations);
        assert!(
            (r.x_final[0] - 5.0).abs() < 1e-5 && r.l0_achieved == 1,
            "{:?}",
            r.x_final
        );
        assert!(r.complementarity_gap <= 1e-6);
    }

    #[test]
    fn penalty_update_bound_example() {
        assert_eq!(penalty_update_bound(1.0, 10.0, 1e-3, 0.01), 20);
    }

    #[test]
    fn first_epm_subproblem_is_plain_l1() {
        let mut first = None;
        epm_solve_observed(&toy(), &SolverConfig::default(), &mut |s| {
            if first.is_none() {
                first = Some(s.clone());
            }
        })
        .unwrap();
        // with u = 0 the x-step is soft thresholding of the prox-anchored
        // quadratic at level rho0
        let s = first.unwrap();
        let expect = crate::vecops::soft_threshold(5.0, 0.01) / (1.0 + 0.01);
        assert!((s.x[0] - expect).abs() < 1e-12);
    }

    #[test]
    fn converged_epm_state_has_small_residuals() {
        let p = toy();
        let mut last = None;
        epm_solve_observed(&p, &SolverConfig::default(), &mut |s| {
            last = Some(s.clone())
        })
        .unwrap();
        let r = kkt_residuals(&last.unwrap(), &p).unwrap();
        assert!(
            r.stationarity <= 1e-5 && r.feasibility <= 1e-5 && r.dual_feasibility <= 1e-5,
            "{r:?}"
        );
    }

    #[test]
    fn kkt_trivial_cases() {
        let obj = ObjectiveSpec::new(2, 1.0)
            .with_smooth(crate::convex_inner::QuadraticTerm::shifted_identity(
                1.0,
                &[0.0, 0.0],
            ))
            .unwrap();
        let p = SparsityProblem::new(obj, AffineMap::identity(2), 1.0).unwrap();
        let s = EpmState {
            x: vec![0.0; 2],
            u: vec![0.0; 2],
            rho: 1.0,
            t: 0,
        };
        let r = kkt_residuals(&s, &p).unwrap();
        assert_eq!(
            (r.stationarity, r.feasibility, r.dual_feasibility),
            (0.0, 0.0, 0.0)
        );
        let s = EpmState {
            x: vec![0.0; 2],
            u: vec![1.0, 1.0],
            rho: 1.0,
            t: 0,
        };
        assert_eq!(kkt_residuals(&s, &p).unwrap().dual_feasibility, 1.0);
    }

    #[test]
    fn multiplier_update_arithmetic() {
        let pi = 0.01 + 0.01 * 0.5;
        assert!((pi - 0.015_f64).abs() < 1e-15);
    }
}
