//! First-order residuals of MPEC iterates.

use super::{AdmState, EpmState, SparsityProblem};
use crate::convex_inner::{WeightedL1Solver, ZPenalty};
use crate::error::Result;
use crate::vecops::{dist2, dot, norm1};

/// Residuals of the KKT system at an iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    /// `mu ||prox_x - x||`: norm of the proximal-point optimality map of the
    /// `x`-block with the other blocks fixed.
    pub stationarity: f64,
    /// Complementarity violation: `||z||_1 - <z, u>` or `max |z| * v`.
    pub feasibility: f64,
    /// Distance of `u` (or `v`) from its admissible set, summed over the
    /// violated constraints.
    pub dual_feasibility: f64,
}

/// Either solver's iterate.
#[derive(Debug, Clone, Copy)]
pub enum SolverState<'a> {
    Epm(&'a EpmState),
    Adm(&'a AdmState),
}

impl<'a> From<&'a EpmState> for SolverState<'a> {
    fn from(s: &'a EpmState) -> Self {
        SolverState::Epm(s)
    }
}

impl<'a> From<&'a AdmState> for SolverState<'a> {
    fn from(s: &'a AdmState) -> Self {
        SolverState::Adm(s)
    }
}

/// Proximal weight of the optimality map.
const PROX_WEIGHT: f64 = 1.0;

pub fn kkt_residuals<'a>(
    state: impl Into<SolverState<'a>>,
    problem: &SparsityProblem,
) -> Result<KktResiduals> {
    let map = &problem.constraint_map;
    let m = map.rows();
    let mut inner = WeightedL1Solver::new(&problem.objective, map)?;
    inner.set_limits(1e-12, 50_000);
    let q0 = vec![0.0; m];
    match state.into() {
        SolverState::Epm(s) => {
            let z = map.apply(&s.x)?;
            let w = vec![s.rho; m];
            let g: Vec<f64> = s.u.iter().map(|u| -s.rho * u).collect();
            let pen = ZPenalty {
                w: &w,
                q: &q0,
                g: &g,
            };
            let xh = inner.solve(pen, PROX_WEIGHT, &s.x, &s.x)?.x;
            let over_budget = (norm1(&s.u) - problem.k).max(0.0);
            let box_violation: f64 = s.u.iter().map(|u| (u.abs() - 1.0).max(0.0)).sum();
            Ok(KktResiduals {
                stationarity: PROX_WEIGHT * dist2(&xh, &s.x),
                feasibility: norm1(&z) - dot(&z, &s.u),
                dual_feasibility: over_budget + box_violation,
            })
        }
        SolverState::Adm(s) => {
            let z = map.apply(&s.x)?;
            let w: Vec<f64> = s.pi.iter().zip(&s.v).map(|(p, v)| p * v).collect();
            let q: Vec<f64> = s.v.iter().map(|v| s.alpha * v * v).collect();
            let pen = ZPenalty {
                w: &w,
                q: &q,
                g: &q0,
            };
            let xh = inner.solve(pen, PROX_WEIGHT, &s.x, &s.x)?.x;
            let feas = z
                .iter()
                .zip(&s.v)
                .fold(0.0_f64, |mx, (zi, v)| mx.max(zi.abs() * v));
            let zeros: f64 = s.v.iter().map(|v| 1.0 - v).sum();
            let over_budget = (zeros - problem.k).max(0.0);
            let box_violation: f64 = s.v.iter().map(|v| (-v).max(0.0) + (v - 1.0).max(0.0)).sum();
            Ok(KktResiduals {
                stationarity: PROX_WEIGHT * dist2(&xh, &s.x),
                feasibility: feas,
                dual_feasibility: over_budget + box_violation,
            })
        }
    }
}
