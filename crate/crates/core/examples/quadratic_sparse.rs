//! Both equilibrium-constrained solvers on a small sparse quadratic, checked
//! against the known best support.

use sparsemp::mpec::{adm_solve, epm_solve, SolverConfig};
use sparsemp::problems::{build_quadratic, generate_quadratic};

fn main() -> sparsemp::Result<()> {
    let n = 10;
    let k = 3;
    let inst = generate_quadratic(n, 7, false);
    let problem = build_quadratic(&inst, k as f64)?;

    // isotropic curvature: the best support keeps the k largest |c_i|
    let mut sq: Vec<f64> = inst.center.iter().map(|c| c * c).collect();
    sq.sort_by(|a, b| b.total_cmp(a));
    let best: f64 = 0.5 * sq[k..].iter().sum::<f64>();

    let cfg = SolverConfig::default();
    // multipliers grow slowly from alpha = 0.01, so ADM gets more room
    let adm_cfg = SolverConfig {
        max_outer: 5000,
        ..cfg.clone()
    };
    for (name, res) in [
        ("epm", epm_solve(&problem, &cfg)?),
        ("adm", adm_solve(&problem, &adm_cfg)?),
    ] {
        println!(
            "{name}: objective {:.6} (optimum {best:.6}), ||x||_0 = {}, gap {:.1e}, {} iterations",
            res.objective_value, res.l0_achieved, res.complementarity_gap, res.outer_iterations
        );
    }
    Ok(())
}
