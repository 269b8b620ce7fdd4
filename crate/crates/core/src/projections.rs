//! Box- and budget-coupled projections.
//!
//! All of them reduce to one diagonal QP over the unit box with a single
//! linear budget, solved exactly by scanning sorted breakpoints of the
//! water-filling parameter `theta`.

use crate::error::{check_len, Error, Result};

/// Direction of the budget constraint `<x, 1> cmp s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Eq,
    Le,
    Ge,
}

/// `min 1/2 x^T diag(d) x + a^T x  s.t.  0 <= x <= 1, <x, 1> cmp s`.
#[derive(Debug, Clone)]
pub struct DiagonalQP {
    pub d: Vec<f64>,
    pub a: Vec<f64>,
    pub s: f64,
    pub cmp: Comparison,
}

impl DiagonalQP {
    pub fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.d)
            .zip(&self.a)
            .map(|((xi, di), ai)| 0.5 * di * xi * xi + ai * xi)
            .sum()
    }
}

#[inline]
fn coord(a: f64, d: f64, theta: f64) -> f64 {
    ((-a - theta) / d).clamp(0.0, 1.0)
}

/// Exact minimizer of a [`DiagonalQP`] in `O(n log n)`.
///
/// Every coordinate has the form `x_i = clip((-a_i - theta) / d_i, 0, 1)`;
/// `theta = 0` whenever an inequality budget is slack at the box-clipped
/// point.
pub fn breakpoint_solve(qp: &DiagonalQP) -> Result<Vec<f64>> {
    let n = qp.d.len();
    check_len(n, qp.a.len())?;
    if let Some(bad) = qp.d.iter().find(|&&d| !(d > 0.0) || !d.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "curvature entries must be positive and finite, got {bad}"
        )));
    }
    if qp.a.iter().any(|a| !a.is_finite()) || !qp.s.is_finite() {
        return Err(Error::InvalidInput(
            "non-finite linear term or budget".into(),
        ));
    }
    let nf = n as f64;
    let free: Vec<f64> = (0..n).map(|i| coord(qp.a[i], qp.d[i], 0.0)).collect();
    let sum0: f64 = free.iter().sum();
    let target = match qp.cmp {
        Comparison::Le => {
            if qp.s < 0.0 {
                return Err(Error::Infeasible(format!("budget {} < 0", qp.s)));
            }
            if sum0 <= qp.s {
                return Ok(free);
            }
            qp.s
        }
        Comparison::Ge => {
            if qp.s > nf {
                return Err(Error::Infeasible(format!("budget {} > n = {n}", qp.s)));
            }
            if sum0 >= qp.s {
                return Ok(free);
            }
            qp.s
        }
        Comparison::Eq => {
            if qp.s < 0.0 || qp.s > nf {
                return Err(Error::Infeasible(format!(
                    "equality budget {} outside [0, {n}]",
                    qp.s
                )));
            }
            qp.s
        }
    };
    let theta = solve_theta(&qp.d, &qp.a, target);
    Ok((0..n).map(|i| coord(qp.a[i], qp.d[i], theta)).collect())
}

/// Maps `f64` to `u64` preserving `total_cmp` order.
fn order_key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | 1 << 63
    }
}

fn from_order_key(k: u64) -> f64 {
    f64::from_bits(if k >> 63 == 1 { k & !(1 << 63) } else { !k })
}

/// Finds `theta` with `sum_i clip((-a_i - theta)/d_i, 0, 1) = target`.
///
/// The sum is continuous and non-increasing in `theta`, piecewise affine
/// with kinks at `-a_i - d_i` (coordinate leaves 1) and `-a_i` (reaches 0).
/// The sorted kinks are bisected for the crossing interval, where the sum
/// is affine and `theta` follows exactly.
fn solve_theta(d: &[f64], a: &[f64], target: f64) -> f64 {
    let n = d.len();
    if n == 0 {
        return 0.0;
    }
    // kinks sorted through order-preserving integer keys
    let mut keys: Vec<u64> = Vec::with_capacity(2 * n);
    keys.extend(a.iter().zip(d).map(|(ai, di)| order_key(-ai - di)));
    keys.extend(a.iter().map(|ai| order_key(-ai)));
    keys.sort_unstable();
    let kinks: Vec<f64> = keys.into_iter().map(from_order_key).collect();

    let inv_d: Vec<f64> = d.iter().map(|di| 1.0 / di).collect();
    let total = |theta: f64| -> f64 {
        a.iter()
            .zip(&inv_d)
            .map(|(ai, wi)| ((-ai - theta) * wi).clamp(0.0, 1.0))
            .sum()
    };
    // below every kink all coordinates sit at 1
    if target >= n as f64 {
        return kinks[0];
    }
    // invariant: total(kinks[lo]) > target >= total(kinks[hi])
    let (mut lo, mut hi) = (0, kinks.len() - 1);
    if total(kinks[hi]) > target {
        return kinks[hi];
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if total(kinks[mid]) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (t0, t1) = (kinks[lo], kinks[hi]);
    // classify at the interior of [t0, t1]; sum = ones + c - theta * slope
    let probe = 0.5 * (t0 + t1);
    let (mut ones, mut c, mut slope) = (0.0, 0.0, 0.0);
    for (&ai, &di) in a.iter().zip(d) {
        if probe <= -ai - di {
            ones += 1.0;
        } else if probe < -ai {
            c -= ai / di;
            slope += 1.0 / di;
        }
    }
    if slope > 0.0 {
        ((ones + c - target) / slope).clamp(t0, t1)
    } else {
        t1
    }
}

/// `argmin_{-1 <= u <= 1, ||u||_1 <= k} 1/2 ||u - z||^2`.
pub fn capped_simplex_project(z: &[f64], k: f64) -> Result<Vec<f64>> {
    if !(k >= 0.0) {
        return Err(Error::InvalidInput(format!("budget must be >= 0, got {k}")));
    }
    let qp = DiagonalQP {
        d: vec![1.0; z.len()],
        a: z.iter().map(|v| -v.abs()).collect(),
        s: k,
        cmp: Comparison::Le,
    };
    let mag = breakpoint_solve(&qp)?;
    Ok(z.iter()
        .zip(mag)
        .map(|(&zi, m)| {
            if zi < 0.0 {
                -m
            } else if zi > 0.0 {
                m
            } else {
                0.0
            }
        })
        .collect())
}

/// Keeps the `k` largest-magnitude entries; ties keep the lower index.
pub fn hard_threshold(x: &[f64], k: usize) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in top_k_indices(x, k) {
        out[i] = x[i];
    }
    out
}

/// Indices of the `k` largest `|x_i|`, ascending index order.
pub fn top_k_indices(x: &[f64], k: usize) -> Vec<usize> {
    let k = k.min(x.len());
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Proximal v-update of the alternating direction method:
/// `argmin_{0<=v<=1, <1, 1-v> <= k} 1/2 v^T D v + <v, b>` with
/// `D = alpha |z|^2 + mu` and `b = pi * |z| - mu * v_prev`.
pub fn v_subproblem_solve(
    abs_ax: &[f64],
    pi: &[f64],
    v_prev: &[f64],
    alpha: f64,
    mu: f64,
    k: f64,
) -> Result<Vec<f64>> {
    let m = abs_ax.len();
    check_len(m, pi.len())?;
    check_len(m, v_prev.len())?;
    if !(k >= 0.0) || k > m as f64 {
        return Err(Error::InvalidInput(format!(
            "sparsity budget {k} outside [0, {m}]"
        )));
    }
    let qp = DiagonalQP {
        d: abs_ax.iter().map(|z| alpha * z * z + mu).collect(),
        a: (0..m).map(|i| pi[i] * abs_ax[i] - mu * v_prev[i]).collect(),
        s: m as f64 - k,
        cmp: Comparison::Ge,
    };
    breakpoint_solve(&qp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn breakpoint_examples() {
        let qp = DiagonalQP {
            d: vec![1.0, 1.0],
            a: vec![-0.5, -0.3],
            s: 2.0,
            cmp: Comparison::Le,
        };
        assert!(close(&breakpoint_solve(&qp).unwrap(), &[0.5, 0.3], 1e-14));
        let qp = DiagonalQP {
            d: vec![1.0, 1.0],
            a: vec![-2.0, -0.5],
            s: 1.0,
            cmp: Comparison::Le,
        };
        assert!(close(&breakpoint_solve(&qp).unwrap(), &[1.0, 0.0], 1e-12));
        let qp = DiagonalQP {
            d: vec![1.0; 3],
            a: vec![-0.9, -0.8, -0.1],
            s: 1.0,
            cmp: Comparison::Le,
        };
        assert!(close(
            &breakpoint_solve(&qp).unwrap(),
            &[0.55, 0.45, 0.0],
            1e-12
        ));
    }

    #[test]
    fn infeasible_equality_budget() {
        let qp = DiagonalQP {
            d: vec![1.0; 2],
            a: vec![0.0; 2],
            s: 3.0,
            cmp: Comparison::Eq,
        };
        assert!(matches!(breakpoint_solve(&qp), Err(Error::Infeasible(_))));
    }

    #[test]
    fn capped_simplex_examples() {
        assert!(close(
            &capped_simplex_project(&[0.5, -0.3], 2.0).unwrap(),
            &[0.5, -0.3],
            1e-14
        ));
        assert!(close(
            &capped_simplex_project(&[-0.9, 0.8, 0.1], 1.0).unwrap(),
            &[-0.55, 0.45, 0.0],
            1e-12
        ));
        assert!(close(
            &capped_simplex_project(&[3.0, 0.0, 0.0], 1.0).unwrap(),
            &[1.0, 0.0, 0.0],
            1e-12
        ));
    }

    #[test]
    fn hard_threshold_examples() {
        assert_eq!(hard_threshold(&[3.0, -1.0, 2.0], 2), vec![3.0, 0.0, 2.0]);
        assert_eq!(hard_threshold(&[1.0, 1.0], 1), vec![1.0, 0.0]);
        assert_eq!(hard_threshold(&[0.0; 3], 1), vec![0.0; 3]);
    }

    #[test]
    fn v_subproblem_examples() {
        let v = v_subproblem_solve(&[0.0; 3], &[0.4, 2.0, 7.0], &[1.0; 3], 0.3, 0.01, 3.0).unwrap();
        assert!(close(&v, &[1.0; 3], 1e-14));
        let v = v_subproblem_solve(&[1.0, 0.0], &[1.0, 1.0], &[1.0, 1.0], 1.0, 0.01, 1.0).unwrap();
        assert!(close(&v, &[0.0, 1.0], 1e-12));
        let v = v_subproblem_solve(&[2.0], &[0.01], &[1.0], 0.01, 0.01, 0.0).unwrap();
        assert!(close(&v, &[1.0], 1e-12));
        assert!(v_subproblem_solve(&[1.0], &[0.0], &[1.0], 1.0, 1.0, 2.0).is_err());
    }
}
