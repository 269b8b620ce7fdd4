//! Comparison methods over the same [`SparsityProblem`] interface.
//!
//! * [`greedy_solve`]: projected gradient with hard thresholding.
//! * [`qpm_solve`]: quadratic penalty on `y = Ax + b` with `||y||_0 <= k`.
//! * [`di_adm_solve`] / [`md_adm_solve`]: ADMM directly on the cardinality
//!   constraint, the latter reporting the running mean of the iterates.
//! * [`cvx_sweep_solve`]: l1 relaxation over a grid of weights followed by
//!   thresholding.
//!
//! Every method ends with an optional support polish: `f` re-minimized with
//! the zero pattern of the thresholded `Ax + b` held fixed.

use rayon::prelude::*;

use crate::convex_inner::{WeightedL1Solver, ZPenalty};
use crate::error::{Error, Result};
use crate::linops::MapKind;
use crate::mpec::{Clock, SolveResult, SparsityProblem, TraceRecord};
use crate::projections::{hard_threshold, top_k_indices};
use crate::vecops::{count_nonzeros, dist2, norm2};

/// Which baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineMethod {
    Greedy,
    Qpm,
    DiAdm,
    MdAdm,
    CvxSweep,
}

impl BaselineMethod {
    pub const ALL: [BaselineMethod; 5] = [
        BaselineMethod::Greedy,
        BaselineMethod::Qpm,
        BaselineMethod::DiAdm,
        BaselineMethod::MdAdm,
        BaselineMethod::CvxSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Greedy => "greedy",
            BaselineMethod::Qpm => "qpm",
            BaselineMethod::DiAdm => "di_adm",
            BaselineMethod::MdAdm => "md_adm",
            BaselineMethod::CvxSweep => "cvx_sweep",
        }
    }
}

/// `2^-10, 2^-8, ..., 2^10`.
pub fn default_lambda_grid() -> Vec<f64> {
    (0..11).map(|i| 2f64.powi(-10 + 2 * i)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    /// Multiplicative growth of the coupling penalty `beta`.
    pub penalty_growth: f64,
    /// Iterations between `beta` increases.
    pub cadence: usize,
    pub beta0: f64,
    pub lambda_grid: Vec<f64>,
    /// Constraint-residual tolerance `||Ax + b - y||_inf`.
    pub eps: f64,
    pub eps_x: f64,
    pub max_iter: usize,
    pub inner_tol: f64,
    pub inner_max_iter: usize,
    /// Re-minimize `f` on the thresholded support.
    pub polish: bool,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod) -> Self {
        Self {
            method,
            penalty_growth: 10f64.sqrt(),
            cadence: 30,
            beta0: 1.0,
            lambda_grid: default_lambda_grid(),
            eps: 1e-6,
            eps_x: 1e-6,
            max_iter: 500,
            inner_tol: crate::convex_inner::DEFAULT_INNER_TOL,
            inner_max_iter: crate::convex_inner::DEFAULT_INNER_MAX_ITER,
            polish: true,
        }
    }
}

/// `beta0 * growth^floor(iteration / cadence)`.
pub fn penalty_schedule(beta0: f64, growth: f64, cadence: usize, iteration: usize) -> f64 {
    beta0 * growth.powi((iteration / cadence.max(1)) as i32)
}

pub fn baseline_solve(problem: &SparsityProblem, config: &BaselineConfig) -> Result<SolveResult> {
    match config.method {
        BaselineMethod::Greedy => greedy_solve(problem, config),
        BaselineMethod::Qpm => qpm_solve(problem, config),
        BaselineMethod::DiAdm => di_adm_solve(problem, config),
        BaselineMethod::MdAdm => md_adm_solve(problem, config),
        BaselineMethod::CvxSweep => cvx_sweep_solve(problem, config),
    }
}

/// l1 mass of `z` outside its `k` largest magnitudes.
fn tail_mass(z: &[f64], k: usize) -> f64 {
    let keep = top_k_indices(z, k);
    let kept: f64 = keep.iter().map(|&i| z[i].abs()).sum();
    z.iter().map(|v| v.abs()).sum::<f64>() - kept
}

/// Minimizes `f` with `(Ax + b)_i = 0` for every row not in `support`.
pub fn polish_support(
    problem: &SparsityProblem,
    support: &[usize],
    x_start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let m = problem.constraint_map.rows();
    let mut w = vec![f64::INFINITY; m];
    for &i in support {
        w[i] = 0.0;
    }
    let zeros = vec![0.0; m];
    let mut inner = WeightedL1Solver::new(&problem.objective, &problem.constraint_map)?;
    inner.set_limits(tol, max_iter);
    let pen = ZPenalty {
        w: &w,
        q: &zeros,
        g: &zeros,
    };
    // a vanishing proximal weight keeps degenerate curvature well posed
    Ok(inner.solve(pen, 1e-10, x_start, x_start)?.x)
}

fn finish(
    problem: &SparsityProblem,
    config: &BaselineConfig,
    x: Vec<f64>,
    iterations: usize,
    converged: bool,
    final_penalty: f64,
    trace: Vec<TraceRecord>,
) -> Result<SolveResult> {
    let k = problem.k_count();
    let map = &problem.constraint_map;
    let mut x = x;
    let z = map.apply(&x)?;
    if config.polish {
        let support = top_k_indices(&z, k);
        x = polish_support(
            problem,
            &support,
            &x,
            config.inner_tol.min(1e-9),
            config.inner_max_iter.max(5000),
        )?;
    } else if count_nonzeros(&z) > k && map.is_identity() {
        let zt = hard_threshold(&z, k);
        x = zt
            .iter()
            .zip(map.offset())
            .map(|(zi, bi)| zi - bi)
            .collect();
    }
    let z = map.apply(&x)?;
    Ok(SolveResult {
        objective_value: problem.objective.value(&x),
        l0_achieved: count_nonzeros(&z),
        complementarity_gap: tail_mass(&z, k),
        outer_iterations: iterations,
        converged,
        final_penalty,
        penalty_updates: 0,
        max_x_norm: norm2(&x),
        max_descent_violation: None,
        rho_cap: None,
        spectral: None,
        trace,
        x_final: x,
    })
}

/// Hard-thresholded gradient descent `z <- HT(x - grad f(x) / L_f + b, k)`.
///
/// Requires a smooth objective and an identity constraint map (offset
/// allowed).
pub fn greedy_solve(problem: &SparsityProblem, config: &BaselineConfig) -> Result<SolveResult> {
    let obj = &problem.objective;
    if !obj.is_smooth() {
        return Err(Error::InvalidInput(
            "greedy descent needs a smooth objective".into(),
        ));
    }
    if !matches!(problem.constraint_map.kind(), MapKind::Identity) {
        return Err(Error::InvalidInput(
            "greedy descent needs an identity constraint map".into(),
        ));
    }
    let lf = obj.smooth_lipschitz();
    if !(lf > 0.0) {
        return Err(Error::InvalidInput(
            "greedy descent needs a positive gradient Lipschitz constant".into(),
        ));
    }
    let clock = Clock::start();
    let n = problem.dim();
    let k = problem.k_count();
    let b = problem.constraint_map.offset();
    let mut x = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut trace = Vec::new();
    let mut support = top_k_indices(&x, k);
    let mut converged = false;
    let mut iterations = 0;
    for t in 0..config.max_iter {
        iterations = t + 1;
        obj.smooth_gradient(&x, &mut grad);
        for i in 0..n {
            v[i] = x[i] - grad[i] / lf + b[i];
        }
        let z = hard_threshold(&v, k);
        let x_new: Vec<f64> = z.iter().zip(b).map(|(zi, bi)| zi - bi).collect();
        let new_support: Vec<usize> = (0..n).filter(|&i| z[i] != 0.0).collect();
        let change = dist2(&x_new, &x) / (1.0 + norm2(&x));
        x = x_new;
        trace.push(TraceRecord {
            iteration: t + 1,
            objective: obj.value(&x),
            gap: 0.0,
            penalty: lf,
            wall_ms: clock.ms(),
        });
        let stable = new_support == support;
        support = new_support;
        if stable && change <= config.eps_x {
            converged = true;
            break;
        }
    }
    finish(problem, config, x, iterations, converged, lf, trace)
}

/// Coupling loop shared by the penalty and ADMM baselines.
fn coupled_loop(
    problem: &SparsityProblem,
    config: &BaselineConfig,
    with_dual: bool,
    mean: Option<&mut Vec<f64>>,
) -> Result<(Vec<f64>, usize, bool, f64, Vec<TraceRecord>)> {
    let clock = Clock::start();
    let map = &problem.constraint_map;
    let n = map.cols();
    let m = map.rows();
    let k = problem.k_count();
    let mut inner = WeightedL1Solver::new(&problem.objective, map)?;
    inner.set_limits(config.inner_tol, config.inner_max_iter);
    let mut x = vec![0.0; n];
    let mut z = map.apply(&x)?;
    let mut dual = vec![0.0; m];
    let w = vec![0.0; m];
    let mut q = vec![0.0; m];
    let mut g = vec![0.0; m];
    let mut shifted = vec![0.0; m];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut beta = config.beta0;
    let mut mean = mean;
    for t in 0..config.max_iter {
        iterations = t + 1;
        beta = penalty_schedule(config.beta0, config.penalty_growth, config.cadence, t);
        // y-step
        for i in 0..m {
            shifted[i] = z[i] + if with_dual { dual[i] / beta } else { 0.0 };
        }
        let y = hard_threshold(&shifted, k);
        // x-step: f(x) + beta/2 ||Ax + b - y + dual/beta||^2
        for i in 0..m {
            q[i] = beta;
            g[i] = if with_dual { dual[i] } else { 0.0 } - beta * y[i];
        }
        let pen = ZPenalty {
            w: &w,
            q: &q,
            g: &g,
        };
        let sol = inner.solve(pen, 0.0, &x, &x).or_else(|e| match e {
            Error::InvalidInput(_) => inner.solve(pen, 1e-10, &x, &x),
            other => Err(other),
        })?;
        let change = dist2(&sol.x, &x) / (1.0 + norm2(&x));
        x = sol.x;
        map.apply_into(&x, &mut z);
        let mut resid = 0.0_f64;
        for i in 0..m {
            let r = z[i] - y[i];
            resid = resid.max(r.abs());
            if with_dual {
                dual[i] += beta * r;
            }
        }
        if let Some(acc) = mean.as_deref_mut() {
            running_mean_update(acc, &x, t + 1);
        }
        trace.push(TraceRecord {
            iteration: t + 1,
            objective: problem.objective.value(&x),
            gap: resid,
            penalty: beta,
            wall_ms: clock.ms(),
        });
        if resid <= config.eps && change <= config.eps_x {
            converged = true;
            break;
        }
    }
    Ok((x, iterations, converged, beta, trace))
}

/// Folds the `count`-th sample into a running arithmetic mean.
pub fn running_mean_update(mean: &mut [f64], sample: &[f64], count: usize) {
    let c = count as f64;
    for (a, s) in mean.iter_mut().zip(sample) {
        *a += (s - *a) / c;
    }
}

/// Quadratic penalty method with `beta` grown by `penalty_growth` every
/// `cadence` iterations.
pub fn qpm_solve(problem: &SparsityProblem, config: &BaselineConfig) -> Result<SolveResult> {
    let (x, it, conv, beta, trace) = coupled_loop(problem, config, false, None)?;
    finish(problem, config, x, it, conv, beta, trace)
}

/// ADMM on `y = Ax + b`, `||y||_0 <= k` with an unscaled dual.
pub fn di_adm_solve(problem: &SparsityProblem, config: &BaselineConfig) -> Result<SolveResult> {
    let (x, it, conv, beta, trace) = coupled_loop(problem, config, true, None)?;
    finish(problem, config, x, it, conv, beta, trace)
}

/// [`di_adm_solve`] reporting the running mean of the iterates.
pub fn md_adm_solve(problem: &SparsityProblem, config: &BaselineConfig) -> Result<SolveResult> {
    let mut mean = vec![0.0; problem.dim()];
    let (_, it, conv, beta, trace) = coupled_loop(problem, config, true, Some(&mut mean))?;
    finish(problem, config, mean, it, conv, beta, trace)
}

/// Solves `min f(x) + lambda ||Ax + b||_1` per grid value, thresholds to the
/// `k` largest entries and keeps the best objective.
pub fn cvx_sweep_solve(problem: &SparsityProblem, config: &BaselineConfig) -> Result<SolveResult> {
    if config.lambda_grid.is_empty() {
        return Err(Error::InvalidInput("empty lambda grid".into()));
    }
    let clock = Clock::start();
    let m = problem.constraint_map.rows();
    let candidates: Vec<Result<SolveResult>> = config
        .lambda_grid
        .par_iter()
        .map(|&lambda| {
            let mut inner = WeightedL1Solver::new(&problem.objective, &problem.constraint_map)?;
            inner.set_limits(config.inner_tol, config.inner_max_iter);
            let w = vec![lambda; m];
            let zeros = vec![0.0; m];
            let pen = ZPenalty {
                w: &w,
                q: &zeros,
                g: &zeros,
            };
            let x0 = vec![0.0; problem.dim()];
            let sol = inner.solve(pen, 1e-10, &x0, &x0)?;
            finish(
                problem,
                config,
                sol.x,
                sol.iterations,
                true,
                lambda,
                Vec::new(),
            )
        })
        .collect();
    let mut best: Option<SolveResult> = None;
    let mut trace = Vec::new();
    for (i, cand) in candidates.into_iter().enumerate() {
        let cand = cand?;
        trace.push(TraceRecord {
            iteration: i + 1,
            objective: cand.objective_value,
            gap: cand.complementarity_gap,
            penalty: cand.final_penalty,
            wall_ms: clock.ms(),
        });
        let feasible = cand.l0_achieved as f64 <= problem.k;
        let better = match &best {
            None => true,
            Some(b) => {
                let b_feasible = b.l0_achieved as f64 <= problem.k;
                (feasible && !b_feasible)
                    || (feasible == b_feasible && cand.objective_value < b.objective_value)
            }
        };
        if better {
            best = Some(cand);
        }
    }
    let mut best = best.expect("grid is nonempty");
    best.outer_iterations = config.lambda_grid.len();
    best.trace = trace;
    Ok(best)
}
