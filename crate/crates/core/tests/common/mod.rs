//! Brute-force oracles shared by the integration suites.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsemp::convex_inner::{
    BoxIndicator, HingeLoss, LinfNorm, LogisticTerm, ProxFunction, QuadraticTerm, SmoothTerm,
    TotalVariation, TvNorm,
};
use sparsemp::linops::{AffineMap, DenseMatrix};
use sparsemp::problems::QuadraticInstance;
use sparsemp::projections::{Comparison, DiagonalQP};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn random_qp(rng: &mut ChaCha8Rng, cmp: Comparison) -> DiagonalQP {
    let n = rng.random_range(1..=8);
    DiagonalQP {
        d: random_vec(rng, n, 0.1, 3.0),
        a: random_vec(rng, n, -3.0, 1.0),
        s: rng.random_range(0.0..n as f64),
        cmp,
    }
}

fn feasible(qp: &DiagonalQP, x: &[f64]) -> bool {
    let tol = 1e-12;
    if x.iter().any(|&v| v < -tol || v > 1.0 + tol) {
        return false;
    }
    let sum: f64 = x.iter().sum();
    match qp.cmp {
        Comparison::Eq => (sum - qp.s).abs() <= 1e-10,
        Comparison::Le => sum <= qp.s + 1e-10,
        Comparison::Ge => sum >= qp.s - 1e-10,
    }
}

/// Active-set enumeration: every coordinate at 0, at 1 or free, with the
/// budget either active or not. Free coordinates solve the stationarity
/// equations in closed form; the best feasible candidate wins.
pub fn qp_oracle(qp: &DiagonalQP) -> Option<Vec<f64>> {
    let n = qp.d.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let patterns = 3usize.pow(n as u32);
    for code in 0..patterns {
        let mut state = vec![0u8; n];
        let mut c = code;
        for s in state.iter_mut() {
            *s = (c % 3) as u8;
            c /= 3;
        }
        for budget_active in [false, true] {
            let theta = if budget_active {
                let (mut num, mut den) = (0.0, 0.0);
                let mut fixed = 0.0;
                for i in 0..n {
                    match state[i] {
                        1 => fixed += 1.0,
                        2 => {
                            num += -qp.a[i] / qp.d[i];
                            den += 1.0 / qp.d[i];
                        }
                        _ => {}
                    }
                }
                if den == 0.0 {
                    if (fixed - qp.s).abs() > 1e-12 {
                        continue;
                    }
                    0.0
                } else {
                    (num + fixed - qp.s) / den
                }
            } else {
                0.0
            };
            let x: Vec<f64> = (0..n)
                .map(|i| match state[i] {
                    0 => 0.0,
                    1 => 1.0,
                    _ => (-qp.a[i] - theta) / qp.d[i],
                })
                .collect();
            if !feasible(qp, &x) {
                continue;
            }
            let v = qp.objective(&x);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x));
            }
        }
    }
    best.map(|(_, x)| x)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Best objective of `sum_i c_i/2 (x_i - center_i)^2` over supports of size
/// at most `k`, by enumerating every subset.
pub fn quadratic_support_optimum(inst: &QuadraticInstance, k: usize) -> f64 {
    let n = inst.center.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize > k {
            continue;
        }
        let v: f64 = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| 0.5 * inst.curvature[i] * inst.center[i] * inst.center[i])
            .sum();
        best = best.min(v);
    }
    best
}

/// All `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

pub fn random_dense(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(rows, cols, random_vec(rng, rows * cols, -1.0, 1.0)).unwrap()
}

/// One full-row-rank map of every kind (random dense matrices have full
/// rank almost surely).
pub fn full_row_rank_maps(seed: u64) -> Vec<(&'static str, AffineMap)> {
    let mut r = rng(seed);
    let dense = AffineMap::dense(random_dense(&mut r, 4, 7));
    let stacked = AffineMap::stacked(vec![
        AffineMap::dense(random_dense(&mut r, 2, 6)),
        AffineMap::second_difference(6).unwrap(),
    ])
    .unwrap();
    vec![
        ("identity", AffineMap::identity(6)),
        ("dense", dense),
        (
            "second_difference",
            AffineMap::second_difference(9).unwrap(),
        ),
        ("stacked", stacked),
    ]
}

/// Every map kind, including the rank-deficient ones.
pub fn all_maps(seed: u64) -> Vec<(&'static str, AffineMap)> {
    let mut maps = full_row_rank_maps(seed);
    maps.push((
        "stacked_identity",
        AffineMap::stacked(vec![AffineMap::identity(5), AffineMap::identity(5)]).unwrap(),
    ));
    maps.push(("grad2d", AffineMap::grad2d(3, 4).unwrap()));
    maps
}

/// Matrix of the linear part, column by column.
pub fn matrix_of(map: &AffineMap) -> DMatrix<f64> {
    let (m, n) = (map.rows(), map.cols());
    let mut a = DMatrix::zeros(m, n);
    let mut col = vec![0.0; m];
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        map.apply_linear_into(&e, &mut col);
        for i in 0..m {
            a[(i, j)] = col[i];
        }
    }
    a
}

/// Smallest singular value of `A` from the eigenvalues of `A A^T`.
pub fn sigma_min_oracle(map: &AffineMap) -> f64 {
    let a = matrix_of(map);
    let g = &a * a.transpose();
    g.symmetric_eigenvalues().min().max(0.0).sqrt()
}

pub fn smooth_terms(seed: u64) -> Vec<(&'static str, Arc<dyn SmoothTerm>)> {
    let mut r = rng(seed);
    let n = 5;
    let b = DMatrix::from_vec(n, n, random_vec(&mut r, n * n, -1.0, 1.0));
    let h = &b * b.transpose();
    let dense = QuadraticTerm::dense(h, random_vec(&mut r, n, -1.0, 1.0), 0.3).unwrap();
    let center = random_vec(&mut r, n, -2.0, 2.0);
    let features = Arc::new(random_dense(&mut r, 8, n));
    let labels: Vec<f64> = (0..8)
        .map(|i| if i % 3 == 0 { -1.0 } else { 1.0 })
        .collect();
    vec![
        (
            "shifted_identity",
            Arc::new(QuadraticTerm::shifted_identity(1.7, &center)),
        ),
        ("dense_quadratic", Arc::new(dense)),
        (
            "logistic",
            Arc::new(LogisticTerm::new(features, &labels, 0.1).unwrap()),
        ),
    ]
}

pub fn prox_functions() -> Vec<(&'static str, Arc<dyn ProxFunction>)> {
    vec![
        ("hinge", Arc::new(HingeLoss::new(6))),
        ("linf", Arc::new(LinfNorm::new(6))),
        ("box", Arc::new(BoxIndicator::new(6, -1.0, 1.0).unwrap())),
        (
            "tv_p1",
            Arc::new(TotalVariation::new(3, TvNorm::Anisotropic)),
        ),
        ("tv_p2", Arc::new(TotalVariation::new(3, TvNorm::Isotropic))),
    ]
}

/// Largest componentwise mismatch between the gradient and central
/// differences with step `1e-5`, relative to `max(1, |g_i|)`.
pub fn gradient_fd_error(term: &dyn SmoothTerm, x: &[f64]) -> f64 {
    let h = 1e-5;
    let mut g = vec![0.0; x.len()];
    term.gradient(x, &mut g);
    let mut worst: f64 = 0.0;
    for i in 0..x.len() {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let fd = (term.value(&xp) - term.value(&xm)) / (2.0 * h);
        worst = worst.max((fd - g[i]).abs() / g[i].abs().max(1.0));
    }
    worst
}

/// `g(P(v)) + |P(v) - v|^2 / (2 step) <= g(y) + |y - v|^2 / (2 step)`;
/// returns the violation (positive means it fails).
pub fn prox_inequality_violation(g: &dyn ProxFunction, v: &[f64], y: &[f64], step: f64) -> f64 {
    let mut p = vec![0.0; v.len()];
    g.prox(v, step, &mut p);
    let sq = |a: &[f64]| -> f64 { a.iter().zip(v).map(|(x, w)| (x - w).powi(2)).sum() };
    let lhs = g.value(&p) + sq(&p) / (2.0 * step);
    let rhs = g.value(y) + sq(y) / (2.0 * step);
    if rhs.is_infinite() {
        return f64::NEG_INFINITY;
    }
    lhs - rhs - 1e-12 * (1.0 + rhs.abs())
}
