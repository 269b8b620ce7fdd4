//! Alternating direction method on the separable reformulation.
//!
//! Augmented Lagrangian of `|z| * v = 0` with `z = Ax + b`:
//! `L(x, v, pi) = f(x) + <pi, |z| * v> + alpha/2 || |z| * v ||^2`, `v` kept
//! in `{0 <= v <= 1, <1, 1 - v> <= k}`.

use super::{
    rel_change, validate_config, Clock, SolveResult, SolverConfig, SparsityProblem, TraceRecord,
};
use crate::convex_inner::{WeightedL1Solver, ZPenalty};
use crate::error::Result;
use crate::projections::v_subproblem_solve;
use crate::vecops::{count_nonzeros, dist2, norm2, norm_inf};

/// Iterate of the alternating direction method.
#[derive(Debug, Clone)]
pub struct AdmState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub pi: Vec<f64>,
    pub alpha: f64,
    pub t: usize,
}

/// `L(x, v, pi)` evaluated at `z = Ax + b`.
pub(crate) fn augmented_lagrangian(fx: f64, z: &[f64], v: &[f64], pi: &[f64], alpha: f64) -> f64 {
    let mut s = fx;
    for i in 0..z.len() {
        let c = z[i].abs() * v[i];
        s += pi[i] * c + 0.5 * alpha * c * c;
    }
    s
}

pub fn adm_solve(problem: &SparsityProblem, config: &SolverConfig) -> Result<SolveResult> {
    adm_solve_observed(problem, config, &mut |_| {})
}

/// [`adm_solve`] calling `observer` after every iteration.
pub fn adm_solve_observed(
    problem: &SparsityProblem,
    config: &SolverConfig,
    observer: &mut dyn FnMut(&AdmState),
) -> Result<SolveResult> {
    validate_config(config)?;
    let clock = Clock::start();
    let map = &problem.constraint_map;
    let n = map.cols();
    let m = map.rows();
    let alpha = config.alpha;
    let mu = config.mu;

    let mut inner = WeightedL1Solver::new(&problem.objective, map)?;
    inner.set_limits(config.inner_tol, config.inner_max_iter);

    let mut state = AdmState {
        x: vec![0.0; n],
        v: vec![1.0; m],
        pi: vec![config.eta; m],
        alpha,
        t: 0,
    };
    let mut z = map.apply(&state.x)?;
    let mut abs_z = vec![0.0; m];
    let mut w = vec![0.0; m];
    let mut q = vec![0.0; m];
    let g = vec![0.0; m];
    let mut lag = augmented_lagrangian(
        problem.objective.value(&state.x),
        &z,
        &state.v,
        &state.pi,
        alpha,
    );
    let mut trace = Vec::new();
    let mut max_violation: f64 = f64::NEG_INFINITY;
    let mut max_x_norm: f64 = 0.0;
    let mut converged = false;
    let mut best_feasible: Option<(f64, Vec<f64>)> = None;

    for t in 0..config.max_outer {
        // x-step: weighted l1 with w = pi * v and quadratic weight alpha v^2
        for i in 0..m {
            w[i] = state.pi[i] * state.v[i];
            q[i] = alpha * state.v[i] * state.v[i];
        }
        let pen = ZPenalty {
            w: &w,
            q: &q,
            g: &g,
        };
        let sol = inner.solve(pen, mu, &state.x, &state.x)?;
        let x_new = if sol.objective <= inner.objective_value(pen, mu, &state.x, &state.x) {
            sol.x
        } else {
            state.x.clone()
        };
        map.apply_into(&x_new, &mut z);
        for (a, zi) in abs_z.iter_mut().zip(&z) {
            *a = zi.abs();
        }

        // v-step: proximal diagonal QP over the capped set
        let v_new = v_subproblem_solve(&abs_z, &state.pi, &state.v, alpha, mu, problem.k)?;

        // multiplier ascent
        let mut pi_new = state.pi.clone();
        for i in 0..m {
            pi_new[i] += alpha * abs_z[i] * v_new[i];
        }

        let fx = problem.objective.value(&x_new);
        let lag_new = augmented_lagrangian(fx, &z, &v_new, &pi_new, alpha);
        let dx = dist2(&x_new, &state.x);
        let dv = dist2(&v_new, &state.v);
        let dpi = dist2(&pi_new, &state.pi);
        let bound = lag - 0.5 * mu * dx * dx - 0.5 * mu * dv * dv + dpi * dpi / alpha;
        max_violation = max_violation.max(lag_new - bound);
        lag = lag_new;

        let change = rel_change(&x_new, &state.x).max(rel_change(&v_new, &state.v));
        state.x = x_new;
        state.v = v_new;
        state.pi = pi_new;
        state.t = t + 1;
        max_x_norm = max_x_norm.max(norm2(&state.x));
        let gap = abs_z
            .iter()
            .zip(&state.v)
            .fold(0.0_f64, |mx, (a, v)| mx.max(a * v));
        trace.push(TraceRecord {
            iteration: t + 1,
            objective: fx,
            gap,
            penalty: norm_inf(&state.pi),
            wall_ms: clock.ms(),
        });
        observer(&state);

        let feasible = count_nonzeros(&z) as f64 <= problem.k;
        if feasible && best_feasible.as_ref().is_none_or(|(o, _)| fx < *o) {
            best_feasible = Some((fx, state.x.clone()));
        }
        if gap <= config.eps_gap && change <= config.eps_x && feasible {
            converged = true;
            break;
        }
    }

    let mut x_final = state.x;
    if !converged && problem.l0(&x_final) as f64 > problem.k {
        if let Some((_, xb)) = best_feasible {
            x_final = xb;
        }
    }
    let z = map.apply(&x_final)?;
    let gap = z
        .iter()
        .zip(&state.v)
        .fold(0.0_f64, |mx, (zi, v)| mx.max(zi.abs() * v));
    Ok(SolveResult {
        objective_value: problem.objective.value(&x_final),
        l0_achieved: count_nonzeros(&z),
        complementarity_gap: gap,
        outer_iterations: state.t,
        converged,
        final_penalty: norm_inf(&state.pi),
        penalty_updates: 0,
        max_x_norm,
        max_descent_violation: Some(max_violation),
        rho_cap: None,
        spectral: None,
        trace,
        x_final,
    })
}
