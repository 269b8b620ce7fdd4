//! The closed-form projections the solvers lean on every iteration.

use sparsemp::projections::{
    breakpoint_solve, capped_simplex_project, hard_threshold, v_subproblem_solve, Comparison,
    DiagonalQP,
};

fn main() -> sparsemp::Result<()> {
    let z = [2.5, -0.3, 0.9, -1.7, 0.05];

    // signed projection onto {|u| <= 1, ||u||_1 <= 2}
    let u = capped_simplex_project(&z, 2.0)?;
    println!("capped projection of {z:?}\n  -> {u:?}");

    println!("best 2-sparse approximation: {:?}", hard_threshold(&z, 2));

    // min 1/2 x'Dx + a'x over the unit box with sum(x) >= 3
    let qp = DiagonalQP {
        d: vec![1.0, 2.0, 0.5, 4.0],
        a: vec![-0.2, 0.4, 0.1, -1.0],
        s: 3.0,
        cmp: Comparison::Ge,
    };
    let x = breakpoint_solve(&qp)?;
    println!(
        "diagonal QP: x = {x:?}, sum = {:.6}, objective = {:.6}",
        x.iter().sum::<f64>(),
        qp.objective(&x)
    );

    // v-update with a dominant multiplier marks the nonzeros of |Ax|
    let abs_ax = [0.0, 1.2, 0.0, 0.4];
    let v = v_subproblem_solve(&abs_ax, &[10.0; 4], &[1.0; 4], 0.01, 0.01, 2.0)?;
    println!("v-update on |Ax| = {abs_ax:?}: {v:?}");
    Ok(())
}
