//! Convex subproblem solver shared by every outer method:
//!
//! ```text
//! min_x  f(x) + sum_i [ w_i |z_i| + q_i/2 z_i^2 + g_i z_i ] + mu/2 ||x - x0||^2,
//!        z = A x + b
//! ```
//!
//! When `A` is the identity and `f` is smooth this is a proximal gradient
//! iteration (exact in one step for isotropic quadratics). Otherwise it runs
//! a scaled ADMM with one splitting block for the weighted term and one for
//! every nonsmooth term of `f`; the smooth part enters the x-step exactly if
//! quadratic and linearized otherwise.
//!
//! Weights may be `+inf` to pin `z_i = 0`.

mod prox;
mod terms;

pub use prox::{prox_hinge, prox_linf_compose, prox_tv_groups, TvNorm};
pub use terms::{
    BoxIndicator, Hessian, HingeLoss, LinfNorm, LogisticTerm, ObjectiveSpec, ProxFunction,
    ProxTerm, QuadraticTerm, SmoothTerm, TotalVariation,
};

use nalgebra::{DMatrix, DVector};

use crate::banded::{BandCholesky, BandedSym};
use crate::error::{check_len, Error, Result};
use crate::linops::{AffineMap, MapKind};
use crate::vecops::{dist2, norm2, soft_threshold};

/// Default relative tolerance of inner solves.
pub const DEFAULT_INNER_TOL: f64 = 1e-6;
/// Default iteration cap of inner solves.
pub const DEFAULT_INNER_MAX_ITER: usize = 2000;

/// Separable penalty `sum_i w_i |z_i| + q_i/2 z_i^2 + g_i z_i`.
#[derive(Debug, Clone, Copy)]
pub struct ZPenalty<'a> {
    pub w: &'a [f64],
    pub q: &'a [f64],
    pub g: &'a [f64],
}

impl ZPenalty<'_> {
    /// Value at `z`; an infinite weight contributes nothing when `z_i` is
    /// zero up to `1e-9 (1 + ||z||_inf)` and `+inf` otherwise.
    pub fn value(&self, z: &[f64]) -> f64 {
        let zmax = z.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let pin = 1e-9 * (1.0 + zmax);
        let mut v = 0.0;
        for i in 0..z.len() {
            let a = z[i].abs();
            if self.w[i].is_infinite() {
                if a > pin {
                    return f64::INFINITY;
                }
                continue;
            }
            v += self.w[i] * a + 0.5 * self.q[i] * z[i] * z[i] + self.g[i] * z[i];
        }
        v
    }

    /// `argmin_z w|z| + q/2 z^2 + g z + beta/2 (z - v)^2`, elementwise.
    fn prox_into(&self, v: &[f64], beta: f64, out: &mut [f64]) {
        for i in 0..v.len() {
            out[i] = if self.w[i].is_infinite() {
                0.0
            } else {
                soft_threshold(beta * v[i] - self.g[i], self.w[i]) / (self.q[i] + beta)
            };
        }
    }

    fn check(&self, m: usize) -> Result<()> {
        check_len(m, self.w.len())?;
        check_len(m, self.q.len())?;
        check_len(m, self.g.len())?;
        if self.w.iter().any(|w| !(*w >= 0.0))
            || self.q.iter().any(|q| !(*q >= 0.0 && q.is_finite()))
        {
            return Err(Error::InvalidInput(
                "weights w and q must be nonnegative".into(),
            ));
        }
        if self.g.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidInput("linear term g must be finite".into()));
        }
        Ok(())
    }
}

/// One fully specified subproblem.
#[derive(Debug, Clone)]
pub struct WeightedL1Subproblem<'a> {
    pub objective: &'a ObjectiveSpec,
    pub map: &'a AffineMap,
    pub w: Vec<f64>,
    pub q: Vec<f64>,
    pub g: Vec<f64>,
    pub mu: f64,
    pub x0: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

/// Outcome of an inner solve.
#[derive(Debug, Clone)]
pub struct InnerSolution {
    pub x: Vec<f64>,
    /// Subproblem objective at `x`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Final optimality residual (gradient-mapping norm or max ADMM residual).
    pub residual: f64,
}

/// Solves a single subproblem from `x0`.
pub fn solve_weighted_l1(sub: &WeightedL1Subproblem<'_>) -> Result<Vec<f64>> {
    let mut solver = WeightedL1Solver::new(sub.objective, sub.map)?;
    solver.set_limits(sub.tol, sub.max_iter);
    let pen = ZPenalty {
        w: &sub.w,
        q: &sub.q,
        g: &sub.g,
    };
    Ok(solver.solve(pen, sub.mu, &sub.x0, &sub.x0)?.x)
}

#[derive(Debug)]
enum Curvature {
    Scalar(f64),
    Dense(DMatrix<f64>),
}

#[derive(Debug)]
enum Factor {
    Banded(BandCholesky),
    Dense(nalgebra::Cholesky<f64, nalgebra::Dyn>),
}

impl Factor {
    fn solve_in_place(&self, rhs: &mut [f64]) {
        match self {
            Factor::Banded(c) => c.solve_in_place(rhs),
            Factor::Dense(c) => {
                let sol = c.solve(&DVector::from_column_slice(rhs));
                rhs.copy_from_slice(sol.as_slice());
            }
        }
    }
}

#[derive(Debug)]
struct SplitState {
    gram: BandedSym,
    dense_gram: Option<DMatrix<f64>>,
    curvature: Curvature,
    linearized: bool,
    beta: f64,
    factor: Option<(f64, f64, Factor)>,
    z: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
}

/// Reusable solver for a fixed `(f, A)` pair; successive solves with new
/// penalties warm-start the splitting variables.
#[derive(Debug)]
pub struct WeightedL1Solver<'a> {
    objective: &'a ObjectiveSpec,
    map: &'a AffineMap,
    tol: f64,
    max_iter: usize,
    split: Option<SplitState>,
    row_gram: Option<BandedSym>,
}

impl<'a> WeightedL1Solver<'a> {
    pub fn new(objective: &'a ObjectiveSpec, map: &'a AffineMap) -> Result<Self> {
        check_len(objective.dim(), map.cols())?;
        let split = if map.is_identity() && objective.is_smooth() {
            None
        } else {
            Some(Self::build_split(objective, map))
        };
        Ok(Self {
            objective,
            map,
            tol: DEFAULT_INNER_TOL,
            max_iter: DEFAULT_INNER_MAX_ITER,
            split,
            row_gram: None,
        })
    }

    pub fn set_limits(&mut self, tol: f64, max_iter: usize) {
        self.tol = tol;
        self.max_iter = max_iter.max(1);
    }

    /// True when the proximal gradient route is used.
    pub fn is_proximal_gradient(&self) -> bool {
        self.split.is_none()
    }

    fn build_split(objective: &ObjectiveSpec, map: &AffineMap) -> SplitState {
        let n = map.cols();
        let mut gram = map.column_gram();
        let mut any_dense = matches!(map.kind(), MapKind::Dense(_));
        let mut z = vec![vec![0.0; map.rows()]];
        for t in objective.prox_terms() {
            gram = gram.add(&t.map.column_gram());
            any_dense |= matches!(t.map.kind(), MapKind::Dense(_));
            z.push(vec![0.0; t.map.rows()]);
        }
        let (curvature, linearized) = match objective.quadratic_hessian() {
            Some(Hessian::ScaledIdentity(c)) => (Curvature::Scalar(c), false),
            Some(Hessian::Dense(h)) => {
                any_dense = true;
                (Curvature::Dense(h.as_ref().clone()), false)
            }
            None => (Curvature::Scalar(objective.smooth_lipschitz()), true),
        };
        let dense_gram = (any_dense || 2 * gram.bandwidth() > n)
            .then(|| DMatrix::from_fn(n, n, |i, j| gram.get(i, j)));
        let u = z.clone();
        SplitState {
            gram,
            dense_gram,
            curvature,
            linearized,
            beta: 1.0,
            factor: None,
            z,
            u,
        }
    }

    /// Subproblem objective `f(x) + H(Ax + b) + mu/2 ||x - x0||^2`.
    pub fn objective_value(&self, pen: ZPenalty<'_>, mu: f64, x0: &[f64], x: &[f64]) -> f64 {
        let z = self.map.apply(x).expect("dimension checked");
        let mut v = self.objective.value(x) + pen.value(&z);
        if mu > 0.0 {
            let d = dist2(x, x0);
            v += 0.5 * mu * d * d;
        }
        v
    }

    /// Minimizes the subproblem starting from `x_start`.
    pub fn solve(
        &mut self,
        pen: ZPenalty<'_>,
        mu: f64,
        x0: &[f64],
        x_start: &[f64],
    ) -> Result<InnerSolution> {
        let n = self.map.cols();
        pen.check(self.map.rows())?;
        check_len(n, x0.len())?;
        check_len(n, x_start.len())?;
        if !(mu >= 0.0) {
            return Err(Error::InvalidInput(format!("mu must be >= 0, got {mu}")));
        }
        if self.split.is_none() {
            self.solve_proximal_gradient(pen, mu, x0, x_start)
        } else {
            self.solve_split(pen, mu, x0, x_start)
        }
    }

    fn solve_proximal_gradient(
        &mut self,
        pen: ZPenalty<'_>,
        mu: f64,
        x0: &[f64],
        x_start: &[f64],
    ) -> Result<InnerSolution> {
        let n = x0.len();
        let b = self.map.offset();
        let curv = self.objective.smooth_lipschitz() + mu;
        if !(curv > 0.0) {
            return Err(Error::InvalidInput(
                "subproblem has neither smooth curvature nor a proximal term".into(),
            ));
        }
        let step = 1.0 / curv;
        let start_obj = self.objective_value(pen, mu, x0, x_start);
        let mut x = x_start.to_vec();
        let mut grad = vec![0.0; n];
        let mut v = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=self.max_iter {
            iterations = it;
            self.objective.smooth_gradient(&x, &mut grad);
            for i in 0..n {
                v[i] = x[i] - step * (grad[i] + mu * (x[i] - x0[i])) + b[i];
            }
            pen.prox_into(&v, curv, &mut z);
            let mut change = 0.0;
            let mut xnorm = 0.0;
            for i in 0..n {
                let xn = z[i] - b[i];
                change += (xn - x[i]) * (xn - x[i]);
                xnorm += xn * xn;
                x[i] = xn;
            }
            let change = change.sqrt();
            residual = curv * change;
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::Divergence("non-finite iterate".into()));
            }
            if change <= self.tol * (1.0 + xnorm.sqrt()) {
                converged = true;
                break;
            }
            if it % 50 == 0 && start_obj.is_finite() {
                let obj = self.objective_value(pen, mu, x0, &x);
                check_divergence(start_obj, obj)?;
            }
        }
        let objective = self.objective_value(pen, mu, x0, &x);
        Ok(InnerSolution {
            x,
            objective,
            iterations,
            converged,
            residual,
        })
    }

    fn solve_split(
        &mut self,
        pen: ZPenalty<'_>,
        mu: f64,
        x0: &[f64],
        x_start: &[f64],
    ) -> Result<InnerSolution> {
        let objective = self.objective;
        let map = self.map;
        let tol = self.tol;
        let max_iter = self.max_iter;
        let n = x0.len();
        let lin_curv = objective.smooth_lipschitz();
        let start_obj = self.objective_value(pen, mu, x0, x_start);

        let st = self.split.as_mut().expect("split state present");
        let blocks: Vec<&AffineMap> = std::iter::once(map)
            .chain(objective.prox_terms().iter().map(|t| &t.map))
            .collect();
        let total_rows: usize = blocks.iter().map(|b| b.rows()).sum();

        let mut x = x_start.to_vec();
        let mut x_prev = x.clone();
        let mut grad = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut tmp_n = vec![0.0; n];
        let mut acc_n = vec![0.0; n];
        let mut ax: Vec<Vec<f64>> = blocks.iter().map(|b| vec![0.0; b.rows()]).collect();
        let mut v: Vec<Vec<f64>> = ax.clone();
        let mut z_prev: Vec<Vec<f64>> = st.z.clone();

        let mut residual = f64::INFINITY;
        let mut converged = false;
        let mut iterations = 0;
        for it in 1..=max_iter {
            iterations = it;
            let beta = st.beta;
            ensure_factor(st, mu, n)?;
            // x-step
            objective.smooth_gradient(&x, &mut grad);
            curvature_apply(&st.curvature, &x, &mut rhs);
            for i in 0..n {
                rhs[i] += mu * x0[i] - grad[i];
            }
            for (j, b) in blocks.iter().enumerate() {
                let off = b.offset();
                for (r, vi) in v[j].iter_mut().enumerate() {
                    *vi = st.z[j][r] - st.u[j][r] - off[r];
                }
                b.adjoint_into(&v[j], &mut tmp_n);
                for i in 0..n {
                    rhs[i] += beta * tmp_n[i];
                }
            }
            x_prev.copy_from_slice(&x);
            st.factor
                .as_ref()
                .expect("factor")
                .2
                .solve_in_place(&mut rhs);
            x.copy_from_slice(&rhs);
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::Divergence("non-finite iterate".into()));
            }

            // z-steps and dual updates
            let mut r_pri = 0.0;
            let mut ax_norm = 0.0;
            let mut z_norm = 0.0;
            acc_n.iter_mut().for_each(|v| *v = 0.0);
            for (j, b) in blocks.iter().enumerate() {
                b.apply_into(&x, &mut ax[j]);
                for r in 0..ax[j].len() {
                    v[j][r] = ax[j][r] + st.u[j][r];
                }
                z_prev[j].copy_from_slice(&st.z[j]);
                if j == 0 {
                    pen.prox_into(&v[j], beta, &mut st.z[j]);
                } else {
                    objective.prox_terms()[j - 1]
                        .function
                        .prox(&v[j], 1.0 / beta, &mut st.z[j]);
                }
                for r in 0..ax[j].len() {
                    let d = ax[j][r] - st.z[j][r];
                    st.u[j][r] += d;
                    r_pri += d * d;
                    ax_norm += ax[j][r] * ax[j][r];
                    z_norm += st.z[j][r] * st.z[j][r];
                    v[j][r] = st.z[j][r] - z_prev[j][r];
                }
                b.adjoint_into(&v[j], &mut tmp_n);
                for i in 0..n {
                    acc_n[i] += tmp_n[i];
                }
            }
            let r_pri = r_pri.sqrt();
            let mut r_dual = beta * norm2(&acc_n);
            if st.linearized {
                r_dual += lin_curv * dist2(&x, &x_prev);
            }
            // scaled-dual magnitude for the relative dual tolerance
            acc_n.iter_mut().for_each(|v| *v = 0.0);
            for (j, b) in blocks.iter().enumerate() {
                b.adjoint_into(&st.u[j], &mut tmp_n);
                for i in 0..n {
                    acc_n[i] += tmp_n[i];
                }
            }
            let eps_pri = tol * ((total_rows as f64).sqrt() + ax_norm.sqrt().max(z_norm.sqrt()));
            let eps_dual = tol * ((n as f64).sqrt() + beta * norm2(&acc_n));
            residual = r_pri.max(r_dual);
            if it > 1 && r_pri <= eps_pri && r_dual <= eps_dual {
                converged = true;
                break;
            }
            if it % 25 == 0 && start_obj.is_finite() {
                let obj = split_objective(objective, pen, mu, x0, &x, &st.z);
                check_divergence(start_obj, obj)?;
            }
            if it % 10 == 0 {
                let scale = if r_pri > 10.0 * r_dual {
                    2.0
                } else if r_dual > 10.0 * r_pri {
                    0.5
                } else {
                    1.0
                };
                let new_beta = (st.beta * scale).clamp(1e-8, 1e10);
                if new_beta != st.beta {
                    let ratio = st.beta / new_beta;
                    for u in st.u.iter_mut() {
                        u.iter_mut().for_each(|v| *v *= ratio);
                    }
                    st.beta = new_beta;
                }
            }
        }

        let zero_rows: Vec<usize> = (0..map.rows())
            .filter(|&r| st.z[0][r] == 0.0 && pen.w[r] > 0.0)
            .collect();
        self.restore_zero_rows(&mut x, &zero_rows);
        let objective_value = self.objective_value(pen, mu, x0, &x);
        Ok(InnerSolution {
            x,
            objective: objective_value,
            iterations,
            converged,
            residual,
        })
    }

    /// Minimal-norm correction making `(A x + b)_r = 0` on `rows`.
    fn restore_zero_rows(&mut self, x: &mut [f64], rows: &[usize]) {
        if rows.is_empty() {
            return;
        }
        let b = self.map.offset();
        if self.map.is_identity() {
            for &r in rows {
                x[r] = -b[r];
            }
            return;
        }
        let map = self.map;
        let gram = self.row_gram.get_or_insert_with(|| map.row_gram());
        let sub = gram.principal_submatrix(rows);
        let Ok(chol) = sub.cholesky(1e-12) else {
            log::debug!("zero-row restoration skipped: singular row subset");
            return;
        };
        let z = map.apply(x).expect("dimension checked");
        let mut c: Vec<f64> = rows.iter().map(|&r| z[r]).collect();
        chol.solve_in_place(&mut c);
        let mut full = vec![0.0; map.rows()];
        for (&r, ci) in rows.iter().zip(&c) {
            full[r] = *ci;
        }
        let corr = map.adjoint(&full).expect("dimension checked");
        for (xi, ci) in x.iter_mut().zip(corr) {
            *xi -= ci;
        }
    }
}

fn check_divergence(start: f64, now: f64) -> Result<()> {
    if now.is_nan() || now > start + 1e3 * (start.abs() + 1.0) {
        return Err(Error::Divergence(format!(
            "objective grew from {start:.6e} to {now:.6e}"
        )));
    }
    Ok(())
}

fn split_objective(
    objective: &ObjectiveSpec,
    pen: ZPenalty<'_>,
    mu: f64,
    x0: &[f64],
    x: &[f64],
    z: &[Vec<f64>],
) -> f64 {
    let mut v = objective.smooth_value(x) + pen.value(&z[0]);
    for (t, zj) in objective.prox_terms().iter().zip(&z[1..]) {
        v += t.function.value(zj);
    }
    let d = dist2(x, x0);
    v + 0.5 * mu * d * d
}

fn curvature_apply(c: &Curvature, x: &[f64], out: &mut [f64]) {
    match c {
        Curvature::Scalar(s) => {
            for (o, xi) in out.iter_mut().zip(x) {
                *o = s * xi;
            }
        }
        Curvature::Dense(h) => {
            let hx = h * DVector::from_column_slice(x);
            out.copy_from_slice(hx.as_slice());
        }
    }
}

/// Factors `Curv + mu I + beta G` unless the cached factor matches.
fn ensure_factor(st: &mut SplitState, mu: f64, n: usize) -> Result<()> {
    if let Some((b, m, _)) = &st.factor {
        if *b == st.beta && *m == mu {
            return Ok(());
        }
    }
    let beta = st.beta;
    let factor = match (&st.dense_gram, &st.curvature) {
        (None, Curvature::Scalar(c)) => {
            let m = st.gram.scaled_plus_identity(beta, c + mu);
            Factor::Banded(m.cholesky(1e-14)?)
        }
        _ => {
            let g = st
                .dense_gram
                .clone()
                .unwrap_or_else(|| DMatrix::from_fn(n, n, |i, j| st.gram.get(i, j)));
            let mut m = g * beta;
            match &st.curvature {
                Curvature::Scalar(c) => {
                    for i in 0..n {
                        m[(i, i)] += c + mu;
                    }
                }
                Curvature::Dense(h) => {
                    m += h;
                    for i in 0..n {
                        m[(i, i)] += mu;
                    }
                }
            }
            let chol = nalgebra::Cholesky::new(m).ok_or(Error::RankDeficient { min_eig: 0.0 })?;
            Factor::Dense(chol)
        }
    };
    st.factor = Some((beta, mu, factor));
    Ok(())
}
