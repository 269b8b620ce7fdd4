mod common;

use common::{all_maps, full_row_rank_maps, matrix_of, random_vec, rng, sigma_min_oracle};
use sparsemp::linops::{parse_dense_csv, AffineMap, DenseMatrix};
use sparsemp::vecops::{dot, norm2};
use sparsemp::Error;

#[test]
fn adjoint_is_exact_transpose() {
    for (name, map) in all_maps(1) {
        let mut r = rng(2);
        for _ in 0..100 {
            let x = random_vec(&mut r, map.cols(), -1.0, 1.0);
            let c = random_vec(&mut r, map.rows(), -1.0, 1.0);
            let mut ax = vec![0.0; map.rows()];
            map.apply_linear_into(&x, &mut ax);
            let lhs = dot(&ax, &c);
            let rhs = dot(&x, &map.adjoint(&c).unwrap());
            assert!(
                (lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()),
                "{name}: {lhs} vs {rhs}"
            );
        }
    }
}

#[test]
fn norm_inequality_on_full_row_rank_maps() {
    for (name, map) in full_row_rank_maps(3) {
        let sigma = map.estimate_sigma_min(1e-9).unwrap().sigma_min;
        let mut r = rng(4);
        for _ in 0..100 {
            let c = random_vec(&mut r, map.rows(), -1.0, 1.0);
            let lhs = norm2(&map.adjoint(&c).unwrap());
            assert!(lhs >= sigma * norm2(&c) * (1.0 - 1e-9), "{name}");
        }
    }
}

#[test]
fn sigma_estimates_match_dense_eigendecomposition() {
    for (name, map) in full_row_rank_maps(5) {
        let est = map.estimate_sigma_min(1e-8).unwrap().sigma_min;
        let want = sigma_min_oracle(&map);
        assert!((est - want).abs() <= 1e-6 * want, "{name}: {est} vs {want}");
    }
    let d4 = AffineMap::second_difference(4).unwrap();
    assert!((d4.estimate_sigma_min(1e-10).unwrap().sigma_min - 2f64.sqrt()).abs() < 1e-9);
    let dense = AffineMap::dense(
        DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap(),
    );
    assert!((dense.estimate_sigma_min(1e-10).unwrap().sigma_min - 1.0).abs() < 1e-12);
}

#[test]
fn long_second_difference_uses_iterative_estimate() {
    // beyond the dense cutoff, checked against a full eigendecomposition
    let map = AffineMap::second_difference(802).unwrap();
    let est = map.estimate_sigma_min(1e-6).unwrap().sigma_min;
    let want = sigma_min_oracle(&map);
    assert!((est - want).abs() <= 1e-6 * want, "{est} vs {want}");
}

#[test]
fn rank_deficient_maps_are_reported() {
    for map in [
        AffineMap::stacked(vec![AffineMap::identity(4), AffineMap::identity(4)]).unwrap(),
        AffineMap::grad2d(3, 3).unwrap(),
    ] {
        assert!(matches!(
            map.estimate_sigma_min(1e-8),
            Err(Error::RankDeficient { .. })
        ));
    }
}

#[test]
fn stacked_apply_concatenates_members() {
    let mut r = rng(6);
    let a = AffineMap::dense(common::random_dense(&mut r, 3, 5))
        .with_offset(vec![1.0, 2.0, 3.0])
        .unwrap();
    let b = AffineMap::second_difference(5).unwrap();
    let s = AffineMap::stacked(vec![a.clone(), b.clone()]).unwrap();
    let x = random_vec(&mut r, 5, -1.0, 1.0);
    let mut want = a.apply(&x).unwrap();
    want.extend(b.apply(&x).unwrap());
    assert_eq!(s.apply(&x).unwrap(), want);
}

#[test]
fn shapes_and_documented_values() {
    assert_eq!(AffineMap::second_difference(7).unwrap().rows(), 5);
    let g = AffineMap::grad2d(3, 4).unwrap();
    assert_eq!((g.rows(), g.cols()), (24, 12));
    let d = AffineMap::second_difference(4).unwrap();
    assert_eq!(d.apply(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![0.0, 0.0]);
    assert_eq!(d.adjoint(&[1.0, 0.0]).unwrap(), vec![1.0, -2.0, 1.0, 0.0]);
    assert!(matches!(
        d.apply(&[1.0]),
        Err(Error::DimensionMismatch { .. })
    ));
    // constant images have zero gradient under replicate boundaries
    assert!(g.apply(&[0.7; 12]).unwrap().iter().all(|v| *v == 0.0));
}

#[test]
fn spectral_norm_matches_svd() {
    for (name, map) in all_maps(8) {
        let a = matrix_of(&map);
        let want = a.singular_values().max();
        let got = map.spectral_norm();
        assert!((got - want).abs() <= 1e-6 * want, "{name}: {got} vs {want}");
    }
}

#[test]
fn csv_matrices_parse() {
    let m = parse_dense_csv("1, 2,3\n\n4,5,6\n").unwrap();
    assert_eq!((m.rows(), m.cols()), (2, 3));
    assert_eq!(m.row(1), &[4.0, 5.0, 6.0]);
    assert!(parse_dense_csv("1,2\n3\n").is_err());
    assert!(parse_dense_csv("1,x\n").is_err());
}
