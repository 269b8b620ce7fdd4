//! Exact penalty method on the non-separable reformulation.
//!
//! Minimizes `J_rho(x, u) = f(x) + rho (||z||_1 - <z, u>)`, `z = Ax + b`,
//! over `u` in `{-1 <= u <= 1, ||u||_1 <= k}` by proximal alternation, with
//! `rho` doubled every `T` iterations up to `L / sigma(A)`.

use super::{
    rel_change, validate_config, Clock, SolveResult, SolverConfig, SparsityProblem, TraceRecord,
};
use crate::convex_inner::{WeightedL1Solver, ZPenalty};
use crate::error::{Error, Result};
use crate::linops::SpectralEstimate;
use crate::projections::capped_simplex_project;
use crate::vecops::{count_nonzeros, dot, norm1, norm2};

/// Iterate of the exact penalty method.
#[derive(Debug, Clone)]
pub struct EpmState {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: f64,
    pub t: usize,
}

/// Upper bound on the number of penalty doublings:
/// `ceil((ln(L delta) - ln(eps rho0)) / ln 2)`.
pub fn penalty_update_bound(lipschitz: f64, delta: f64, eps: f64, rho0: f64) -> usize {
    let v = ((lipschitz * delta).ln() - (eps * rho0).ln()) / std::f64::consts::LN_2;
    v.ceil().max(0.0) as usize
}

/// Penalty cap `(1 + 1e-6) L / sigma(A)` or `rho_max` when `sigma(A)` is
/// unavailable.
pub(crate) fn penalty_cap(
    problem: &SparsityProblem,
    config: &SolverConfig,
) -> (f64, Option<SpectralEstimate>) {
    let est = match problem.sigma_override {
        Some(s) => Ok(SpectralEstimate::user_supplied(s)),
        None => problem.constraint_map.estimate_sigma_min(config.sigma_tol),
    };
    match est {
        Ok(e) if e.sigma_min > 0.0 => (
            (1.0 + 1e-6) * problem.objective.lipschitz_f() / e.sigma_min,
            Some(e),
        ),
        Ok(_) | Err(Error::RankDeficient { .. }) => {
            log::warn!(
                "constraint map is rank deficient; capping the penalty at rho_max = {}",
                config.rho_max
            );
            (config.rho_max, None)
        }
        Err(e) => {
            log::warn!("sigma(A) estimation failed ({e}); capping at rho_max");
            (config.rho_max, None)
        }
    }
}

pub fn epm_solve(problem: &SparsityProblem, config: &SolverConfig) -> Result<SolveResult> {
    epm_solve_observed(problem, config, &mut |_| {})
}

/// [`epm_solve`] calling `observer` after every iteration.
pub fn epm_solve_observed(
    problem: &SparsityProblem,
    config: &SolverConfig,
    observer: &mut dyn FnMut(&EpmState),
) -> Result<SolveResult> {
    validate_config(config)?;
    let clock = Clock::start();
    let map = &problem.constraint_map;
    let n = map.cols();
    let m = map.rows();
    let (cap, spectral) = penalty_cap(problem, config);
    let mut rho = config.rho0.min(cap);

    let mut inner = WeightedL1Solver::new(&problem.objective, map)?;
    inner.set_limits(config.inner_tol, config.inner_max_iter);

    let mut state = EpmState {
        x: vec![0.0; n],
        u: vec![0.0; m],
        rho,
        t: 0,
    };
    let mut z = map.apply(&state.x)?;
    let q = vec![0.0; m];
    let mut w = vec![rho; m];
    let mut g = vec![0.0; m];
    let mut trace = Vec::new();
    let mut penalty_updates = 0;
    let mut since_update = 0;
    let mut stalled_at_cap = 0;
    let mut max_x_norm: f64 = 0.0;
    let mut converged = false;
    let mut gap = f64::INFINITY;
    let mut best_feasible: Option<(f64, Vec<f64>)> = None;

    for t in 0..config.max_outer {
        // x-step: f(x) + rho (||z||_1 - <z, u>) + mu/2 ||x - x^t||^2
        w.iter_mut().for_each(|v| *v = rho);
        for (gi, ui) in g.iter_mut().zip(&state.u) {
            *gi = -rho * ui;
        }
        let pen = ZPenalty {
            w: &w,
            q: &q,
            g: &g,
        };
        let sol = inner.solve(pen, config.mu, &state.x, &state.x)?;
        let x_new = if sol.objective <= inner.objective_value(pen, config.mu, &state.x, &state.x) {
            sol.x
        } else {
            state.x.clone()
        };
        map.apply_into(&x_new, &mut z);

        // u-step: projection of u^t + rho z / mu onto the capped set
        let shifted: Vec<f64> = state
            .u
            .iter()
            .zip(&z)
            .map(|(ui, zi)| ui + rho * zi / config.mu)
            .collect();
        let u_new = capped_simplex_project(&shifted, problem.k)?;

        let change = rel_change(&x_new, &state.x).max(rel_change(&u_new, &state.u));
        state.x = x_new;
        state.u = u_new;
        state.t = t + 1;
        max_x_norm = max_x_norm.max(norm2(&state.x));
        gap = norm1(&z) - dot(&z, &state.u);
        let obj = problem.objective.value(&state.x);
        trace.push(TraceRecord {
            iteration: t + 1,
            objective: obj,
            gap,
            penalty: rho,
            wall_ms: clock.ms(),
        });
        observer(&state);

        let l0 = count_nonzeros(&z);
        if l0 as f64 <= problem.k && best_feasible.as_ref().is_none_or(|(o, _)| obj < *o) {
            best_feasible = Some((obj, state.x.clone()));
        }
        if gap <= config.eps_gap && change <= config.eps_x && l0 as f64 <= problem.k {
            converged = true;
            break;
        }

        // penalty schedule: double every T iterations up to the cap; give
        // up after T further iterations without progress at the cap
        since_update += 1;
        if rho >= cap && change <= config.eps_x {
            stalled_at_cap += 1;
            if stalled_at_cap >= config.penalty_cadence {
                break;
            }
        }
        if since_update >= config.penalty_cadence {
            let next = (2.0 * rho).min(cap);
            if next > rho {
                rho = next;
                penalty_updates += 1;
            }
            since_update = 0;
        }
        state.rho = rho;
    }

    let mut x_final = state.x.clone();
    if !converged {
        if let Some((_, xb)) = best_feasible.filter(|_| problem.l0(&state.x) as f64 > problem.k) {
            x_final = xb;
        }
    }
    let z = map.apply(&x_final)?;
    let gap_final = if x_final == state.x {
        gap
    } else {
        norm1(&z) - dot(&z, &state.u)
    };
    Ok(SolveResult {
        objective_value: problem.objective.value(&x_final),
        l0_achieved: count_nonzeros(&z),
        complementarity_gap: gap_final,
        outer_iterations: state.t,
        converged,
        final_penalty: rho,
        penalty_updates,
        max_x_norm,
        max_descent_violation: None,
        rho_cap: Some(cap),
        spectral,
        trace,
        x_final,
    })
}
