//! Sparse regression under an l-infinity correlation loss, with far fewer
//! measurements than unknowns.

use sparsemp::baselines::{baseline_solve, BaselineConfig, BaselineMethod};
use sparsemp::mpec::{epm_solve, SolverConfig};
use sparsemp::problems::{build_segmented_regression, generate_segmented_regression};

fn main() -> sparsemp::Result<()> {
    let inst = generate_segmented_regression(128, 11)?;
    let k = inst.true_support.len();
    let problem = build_segmented_regression(&inst, k as f64)?;
    println!(
        "{} measurements, {} unknowns, k = {k}",
        inst.observations.len(),
        inst.true_signal.len()
    );

    let epm = epm_solve(&problem, &SolverConfig::default())?;
    let cvx = baseline_solve(&problem, &BaselineConfig::new(BaselineMethod::CvxSweep))?;
    for (name, r) in [("mpec_epm", epm), ("cvx_sweep", cvx)] {
        let support: Vec<usize> = (0..r.x_final.len())
            .filter(|&i| r.x_final[i] != 0.0)
            .collect();
        println!(
            "{name:>9}: ||A'(Ax - b)||_inf = {:.4}, support {support:?}",
            r.objective_value
        );
    }
    println!("    truth: support {:?}", inst.true_support);
    Ok(())
}
