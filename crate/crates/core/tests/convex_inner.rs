mod common;

use common::{
    gradient_fd_error, prox_functions, prox_inequality_violation, random_dense, random_vec, rng,
    smooth_terms,
};
use rand::Rng;
use sparsemp::convex_inner::{
    prox_hinge, prox_linf_compose, prox_tv_groups, solve_weighted_l1, LinfNorm, ObjectiveSpec,
    QuadraticTerm, TvNorm, WeightedL1Solver, WeightedL1Subproblem, ZPenalty,
};
use sparsemp::linops::AffineMap;
use sparsemp::vecops::soft_threshold;

#[test]
fn gradients_match_central_differences() {
    for (name, term) in smooth_terms(11) {
        let mut r = rng(12);
        for _ in 0..50 {
            let x = random_vec(&mut r, term.dim(), -2.0, 2.0);
            let err = gradient_fd_error(term.as_ref(), &x);
            assert!(err <= 1e-5, "{name}: {err}");
        }
    }
}

#[test]
fn prox_operators_satisfy_prox_inequality() {
    for (name, g) in prox_functions() {
        let mut r = rng(13);
        for i in 0..50 {
            let v = random_vec(&mut r, g.dim(), -3.0, 3.0);
            // half the comparison points inside the unit box so the
            // indicator is finite there
            let y = if i % 2 == 0 {
                random_vec(&mut r, g.dim(), -1.0, 1.0)
            } else {
                random_vec(&mut r, g.dim(), -3.0, 3.0)
            };
            let step = r.random_range(0.05..3.0);
            let viol = prox_inequality_violation(g.as_ref(), &v, &y, step);
            assert!(viol <= 0.0, "{name}: violation {viol}");
        }
    }
}

#[test]
fn documented_prox_values() {
    let mut out = [0.0];
    prox_hinge(&[2.0], 0.7, &mut out);
    assert_eq!(out, [2.0]);
    prox_hinge(&[-1.0], 0.5, &mut out);
    assert_eq!(out, [-0.5]);
    prox_hinge(&[1.0], 0.5, &mut out);
    assert_eq!(out, [1.0]);

    let mut out = [0.0; 2];
    prox_linf_compose(&[0.5, -0.2], 1.0, &mut out);
    assert_eq!(out, [0.0, 0.0]);
    prox_linf_compose(&[3.0, 0.0], 1.0, &mut out);
    assert!((out[0] - 2.0).abs() < 1e-12 && out[1] == 0.0);

    let (mut ox, mut oy) = ([0.0], [0.0]);
    prox_tv_groups(&[3.0], &[4.0], 5.0, TvNorm::Isotropic, &mut ox, &mut oy);
    assert_eq!((ox[0], oy[0]), (0.0, 0.0));
    prox_tv_groups(&[3.0], &[4.0], 2.5, TvNorm::Isotropic, &mut ox, &mut oy);
    assert!((ox[0] - 1.5).abs() < 1e-12 && (oy[0] - 2.0).abs() < 1e-12);
    prox_tv_groups(&[-2.0], &[0.0], 1.0, TvNorm::Anisotropic, &mut ox, &mut oy);
    assert_eq!(ox[0], -1.0);
}

#[test]
fn weighted_l1_examples() {
    let id = AffineMap::identity(2);
    let zero = ObjectiveSpec::new(2, 1.0);
    let sub = WeightedL1Subproblem {
        objective: &zero,
        map: &id,
        w: vec![1.0; 2],
        q: vec![0.0; 2],
        g: vec![0.0; 2],
        mu: 1.0,
        x0: vec![2.0, 0.1],
        tol: 1e-10,
        max_iter: 1000,
    };
    let x = solve_weighted_l1(&sub).unwrap();
    assert!((x[0] - 1.0).abs() < 1e-8 && x[1].abs() < 1e-8);

    let quad = ObjectiveSpec::new(2, 1.0)
        .with_smooth(QuadraticTerm::shifted_identity(1.0, &[3.0, 3.0]))
        .unwrap();
    let sub = WeightedL1Subproblem {
        objective: &quad,
        w: vec![0.0; 2],
        x0: vec![1.0, 1.0],
        ..sub
    };
    let x = solve_weighted_l1(&sub).unwrap();
    assert!((x[0] - 2.0).abs() < 1e-8 && (x[1] - 2.0).abs() < 1e-8);

    // exact penalty x-step with u = 0, rho = 2, no proximal term
    let one = AffineMap::identity(1);
    let f = ObjectiveSpec::new(1, 1.0)
        .with_smooth(QuadraticTerm::shifted_identity(1.0, &[1.0]))
        .unwrap();
    let sub = WeightedL1Subproblem {
        objective: &f,
        map: &one,
        w: vec![2.0],
        q: vec![0.0],
        g: vec![0.0],
        mu: 0.0,
        x0: vec![0.5],
        tol: 1e-10,
        max_iter: 1000,
    };
    assert!(solve_weighted_l1(&sub).unwrap()[0].abs() < 1e-12);
}

#[test]
fn separable_subproblem_matches_closed_form() {
    let mut r = rng(21);
    for _ in 0..50 {
        let n = r.random_range(1..=6);
        let c = r.random_range(0.2..3.0);
        let center = random_vec(&mut r, n, -3.0, 3.0);
        let f = ObjectiveSpec::new(n, 1.0)
            .with_smooth(QuadraticTerm::shifted_identity(c, &center))
            .unwrap();
        let map = AffineMap::identity(n);
        let w = random_vec(&mut r, n, 0.0, 2.0);
        let q = random_vec(&mut r, n, 0.0, 2.0);
        let g = random_vec(&mut r, n, -1.0, 1.0);
        let mu = r.random_range(0.0..1.0);
        let x0 = random_vec(&mut r, n, -2.0, 2.0);
        let sub = WeightedL1Subproblem {
            objective: &f,
            map: &map,
            w: w.clone(),
            q: q.clone(),
            g: g.clone(),
            mu,
            x0: x0.clone(),
            tol: 1e-12,
            max_iter: 5000,
        };
        let x = solve_weighted_l1(&sub).unwrap();
        for i in 0..n {
            let want = soft_threshold(c * center[i] + mu * x0[i] - g[i], w[i]) / (c + q[i] + mu);
            assert!(
                (x[i] - want).abs() <= 1e-6 * (1.0 + want.abs()),
                "{} vs {want}",
                x[i]
            );
        }
    }
}

/// Coordinate perturbations of a convex function's minimizer cannot lower
/// its value; a solver that stops early fails this.
fn assert_coordinatewise_minimal(
    solver: &WeightedL1Solver<'_>,
    pen: ZPenalty<'_>,
    mu: f64,
    x0: &[f64],
    x: &[f64],
) {
    let base = solver.objective_value(pen, mu, x0, x);
    for i in 0..x.len() {
        for d in [1e-3, -1e-3, 1e-1, -1e-1] {
            let mut y = x.to_vec();
            y[i] += d;
            let v = solver.objective_value(pen, mu, x0, &y);
            assert!(
                v >= base - 1e-6 * (1.0 + base.abs()),
                "coordinate {i} step {d}: {v} < {base}"
            );
        }
    }
}

#[test]
fn split_solver_reaches_minimum_on_dense_maps() {
    let mut r = rng(31);
    for trial in 0..10 {
        let (m, n) = (3, 5);
        let map = AffineMap::dense(random_dense(&mut r, m, n));
        let center = random_vec(&mut r, n, -2.0, 2.0);
        let mut f = ObjectiveSpec::new(n, 1.0)
            .with_smooth(QuadraticTerm::shifted_identity(1.0, &center))
            .unwrap();
        if trial % 2 == 1 {
            let b = AffineMap::dense(random_dense(&mut r, 4, n));
            f = f.with_prox(LinfNorm::new(4), b).unwrap();
        }
        let w = random_vec(&mut r, m, 0.0, 1.0);
        let q = random_vec(&mut r, m, 0.0, 1.0);
        let g = random_vec(&mut r, m, -0.5, 0.5);
        let pen = ZPenalty {
            w: &w,
            q: &q,
            g: &g,
        };
        let x0 = random_vec(&mut r, n, -1.0, 1.0);
        let mut solver = WeightedL1Solver::new(&f, &map).unwrap();
        solver.set_limits(1e-12, 50_000);
        let sol = solver.solve(pen, 0.1, &x0, &x0).unwrap();
        assert_coordinatewise_minimal(&solver, pen, 0.1, &x0, &sol.x);
    }
}

#[test]
fn warm_started_solves_do_not_increase_the_objective() {
    // repeated solves of the same subproblem from the previous answer
    let mut r = rng(41);
    let n = 6;
    let map = AffineMap::second_difference(n).unwrap();
    let center = random_vec(&mut r, n, -2.0, 2.0);
    let f = ObjectiveSpec::new(n, 1.0)
        .with_smooth(QuadraticTerm::shifted_identity(1.0, &center))
        .unwrap();
    let w = vec![0.5; n - 2];
    let q = vec![0.0; n - 2];
    let g = vec![0.0; n - 2];
    let pen = ZPenalty {
        w: &w,
        q: &q,
        g: &g,
    };
    let x0 = vec![0.0; n];
    let mut solver = WeightedL1Solver::new(&f, &map).unwrap();
    solver.set_limits(1e-6, 50);
    let mut x = x0.clone();
    let mut last = solver.objective_value(pen, 0.0, &x0, &x);
    for _ in 0..20 {
        x = solver.solve(pen, 0.0, &x0, &x).unwrap().x;
        let v = solver.objective_value(pen, 0.0, &x0, &x);
        assert!(v <= last + 1e-9 * (1.0 + last.abs()), "{v} > {last}");
        last = v;
    }
}

#[test]
fn infinite_weights_pin_entries() {
    let n = 3;
    let map = AffineMap::identity(n);
    let f = ObjectiveSpec::new(n, 1.0)
        .with_smooth(QuadraticTerm::shifted_identity(1.0, &[1.0, 2.0, 3.0]))
        .unwrap();
    let w = [f64::INFINITY, 0.0, 0.0];
    let zeros = [0.0; 3];
    let mut solver = WeightedL1Solver::new(&f, &map).unwrap();
    let x = solver
        .solve(
            ZPenalty {
                w: &w,
                q: &zeros,
                g: &zeros,
            },
            0.0,
            &zeros,
            &zeros,
        )
        .unwrap()
        .x;
    assert!(x[0].abs() < 1e-9 && (x[1] - 2.0).abs() < 1e-6 && (x[2] - 3.0).abs() < 1e-6);
}

#[test]
fn negative_weights_are_rejected() {
    let map = AffineMap::identity(1);
    let f = ObjectiveSpec::new(1, 1.0);
    let mut solver = WeightedL1Solver::new(&f, &map).unwrap();
    let pen = ZPenalty {
        w: &[-1.0],
        q: &[0.0],
        g: &[0.0],
    };
    assert!(solver.solve(pen, 1.0, &[0.0], &[0.0]).is_err());
}
