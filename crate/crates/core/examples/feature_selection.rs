//! Sparse logistic and hinge-loss classifiers on synthetic data.

use sparsemp::baselines::{baseline_solve, BaselineConfig, BaselineMethod};
use sparsemp::mpec::{epm_solve, SolverConfig};
use sparsemp::problems::{
    build_feature_selection, generate_classification, Loss, DEFAULT_BOX_BOUND,
};

fn accuracy(features: &sparsemp::linops::DenseMatrix, labels: &[f64], w: &[f64]) -> f64 {
    let hits = labels
        .iter()
        .enumerate()
        .filter(|(i, y)| sparsemp::vecops::dot(features.row(*i), w) * **y > 0.0)
        .count();
    hits as f64 / labels.len() as f64
}

fn main() -> sparsemp::Result<()> {
    let data = generate_classification(200, 40, 5, 1e-2, 3)?;
    let k = 5.0;
    for loss in [Loss::Logistic, Loss::Hinge] {
        let problem = build_feature_selection(&data, loss, k, DEFAULT_BOX_BOUND)?;
        let epm = epm_solve(&problem, &SolverConfig::default())?;
        let qpm = baseline_solve(&problem, &BaselineConfig::new(BaselineMethod::Qpm))?;
        println!("{loss:?}");
        for (name, r) in [("mpec_epm", &epm), ("qpm", &qpm)] {
            println!(
                "  {name:>8}: objective {:.4}, {} features, train accuracy {:.3}",
                r.objective_value,
                r.l0_achieved,
                accuracy(&data.features, &data.labels, &r.x_final)
            );
        }
    }
    Ok(())
}
