mod common;

use common::{max_abs_diff, qp_oracle, random_qp, rng, subsets};
use proptest::prelude::*;
use sparsemp::projections::{
    breakpoint_solve, capped_simplex_project, hard_threshold, v_subproblem_solve, Comparison,
    DiagonalQP,
};

#[test]
fn breakpoint_matches_active_set_enumeration() {
    for (ci, cmp) in [Comparison::Eq, Comparison::Le, Comparison::Ge]
        .into_iter()
        .enumerate()
    {
        let mut r = rng(100 + ci as u64);
        for _ in 0..200 {
            let qp = random_qp(&mut r, cmp);
            let want = qp_oracle(&qp).expect("s in [0, n] is feasible");
            let got = breakpoint_solve(&qp).unwrap();
            assert!(
                max_abs_diff(&got, &want) <= 1e-8,
                "{qp:?}: {got:?} vs {want:?}"
            );
        }
    }
}

#[test]
fn water_filling_form() {
    let mut r = rng(7);
    for _ in 0..100 {
        let qp = random_qp(&mut r, Comparison::Le);
        let x = breakpoint_solve(&qp).unwrap();
        // recover theta from any strictly interior coordinate
        let theta = (0..x.len())
            .find(|&i| x[i] > 1e-9 && x[i] < 1.0 - 1e-9)
            .map(|i| -qp.a[i] - qp.d[i] * x[i]);
        if let Some(t) = theta {
            for i in 0..x.len() {
                let want = ((-qp.a[i] - t) / qp.d[i]).clamp(0.0, 1.0);
                assert!((x[i] - want).abs() <= 1e-9);
            }
            assert!(t >= -1e-9, "le budget multiplier must be nonnegative");
        }
    }
}

#[test]
fn infeasible_equality_budget_is_rejected() {
    let qp = DiagonalQP {
        d: vec![1.0; 2],
        a: vec![0.0; 2],
        s: 3.0,
        cmp: Comparison::Eq,
    };
    assert!(breakpoint_solve(&qp).is_err());
}

#[test]
fn documented_projection_values() {
    let u = capped_simplex_project(&[-0.9, 0.8, 0.1], 1.0).unwrap();
    assert!(max_abs_diff(&u, &[-0.55, 0.45, 0.0]) < 1e-12);
    let u = capped_simplex_project(&[3.0, 0.0, 0.0], 1.0).unwrap();
    assert!(max_abs_diff(&u, &[1.0, 0.0, 0.0]) < 1e-12);
    assert_eq!(hard_threshold(&[3.0, -1.0, 2.0], 2), vec![3.0, 0.0, 2.0]);
    assert_eq!(hard_threshold(&[1.0, 1.0], 1), vec![1.0, 0.0]);
    let v = v_subproblem_solve(&[1.0, 0.0], &[1.0, 1.0], &[1.0, 1.0], 1.0, 0.01, 1.0).unwrap();
    assert!(max_abs_diff(&v, &[0.0, 1.0]) < 1e-12);
    assert!(v_subproblem_solve(&[1.0], &[1.0], &[1.0], 1.0, 0.01, 2.0).is_err());
}

fn vec_strategy(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn capped_projection_is_feasible_and_optimal(z in vec_strategy(8), k in 0.0..8.0f64) {
        let u = capped_simplex_project(&z, k).unwrap();
        let l1: f64 = u.iter().map(|v| v.abs()).sum();
        prop_assert!(l1 <= k + 1e-10);
        prop_assert!(u.iter().all(|v| v.abs() <= 1.0));
        // magnitudes solve the unsigned QP; compare against enumeration
        let qp = DiagonalQP {
            d: vec![1.0; z.len()],
            a: z.iter().map(|v| -v.abs()).collect(),
            s: k,
            cmp: Comparison::Le,
        };
        let oracle = qp_oracle(&qp).unwrap();
        let mags: Vec<f64> = u.iter().map(|v| v.abs()).collect();
        prop_assert!(max_abs_diff(&mags, &oracle) <= 1e-8);
    }

    #[test]
    fn capped_projection_is_nonexpansive(
        pair in (1usize..=8).prop_flat_map(|n| (
            prop::collection::vec(-3.0..3.0f64, n),
            prop::collection::vec(-3.0..3.0f64, n),
        )),
        k in 0.0..8.0f64,
    ) {
        let (z1, z2) = pair;
        let p1 = capped_simplex_project(&z1, k).unwrap();
        let p2 = capped_simplex_project(&z2, k).unwrap();
        let dp: f64 = p1.iter().zip(&p2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let dz: f64 = z1.iter().zip(&z2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(dp <= dz + 1e-10);
    }

    #[test]
    fn projections_are_idempotent(z in vec_strategy(8), k in 0.0..8.0f64) {
        let p = capped_simplex_project(&z, k).unwrap();
        let pp = capped_simplex_project(&p, k).unwrap();
        prop_assert!(max_abs_diff(&p, &pp) <= 1e-10);

        let kc = (k as usize).min(z.len());
        let h = hard_threshold(&z, kc);
        prop_assert_eq!(hard_threshold(&h, kc), h);
    }

    #[test]
    fn hard_threshold_is_best_k_sparse(z in vec_strategy(8), k in 0usize..=8) {
        let k = k.min(z.len());
        let h = hard_threshold(&z, k);
        prop_assert!(h.iter().filter(|v| **v != 0.0).count() <= k);
        let err = |y: &[f64]| -> f64 { z.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum() };
        let got = err(&h);
        let best = subsets(z.len(), k)
            .into_iter()
            .map(|s| {
                let mut y = vec![0.0; z.len()];
                for i in s { y[i] = z[i]; }
                err(&y)
            })
            .fold(f64::INFINITY, f64::min);
        prop_assert!(got <= best + 1e-12);
    }

    #[test]
    fn v_update_stays_in_budget_set(
        m in 1usize..=8,
        seed in any::<u64>(),
        alpha in 0.01..10.0f64,
    ) {
        let mut r = rng(seed);
        let abs_ax = common::random_vec(&mut r, m, 0.0, 3.0);
        let pi = common::random_vec(&mut r, m, 0.0, 2.0);
        let v_prev = common::random_vec(&mut r, m, 0.0, 1.0);
        let k = rand::Rng::random_range(&mut r, 0.0..=m as f64);
        let v = v_subproblem_solve(&abs_ax, &pi, &v_prev, alpha, 0.01, k).unwrap();
        prop_assert!(v.iter().all(|x| (0.0..=1.0).contains(x)));
        let deficit: f64 = v.iter().map(|x| 1.0 - x).sum();
        prop_assert!(deficit <= k + 1e-9);
    }
}
