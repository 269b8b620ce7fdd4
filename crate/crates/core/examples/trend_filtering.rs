//! Piecewise-linear trend with at most k kinks, fitted by every solver.

use sparsemp::baselines::{baseline_solve, BaselineConfig, BaselineMethod};
use sparsemp::mpec::{adm_solve, epm_solve, SolveResult, SolverConfig};
use sparsemp::problems::{build_trend_filtering, generate_trend_series};

fn main() -> sparsemp::Result<()> {
    // an optional series file, one value per line
    let series = match std::env::args().nth(1) {
        Some(path) => sparsemp::problems::io::parse_series(&std::fs::read_to_string(path)?)?,
        None => generate_trend_series(200, 6, 0.02, 1),
    };
    let k = 12.0;
    let problem = build_trend_filtering(&series, k)?;

    let cfg = SolverConfig::default();
    let mut runs: Vec<(&str, SolveResult)> = vec![
        ("mpec_epm", epm_solve(&problem, &cfg)?),
        (
            "mpec_adm",
            adm_solve(
                &problem,
                &SolverConfig {
                    alpha: 100.0,
                    ..cfg.clone()
                },
            )?,
        ),
    ];
    for m in [
        BaselineMethod::Qpm,
        BaselineMethod::DiAdm,
        BaselineMethod::MdAdm,
    ] {
        runs.push((m.name(), baseline_solve(&problem, &BaselineConfig::new(m))?));
    }
    println!("n = {}, k = {k}", series.len());
    for (name, r) in &runs {
        println!(
            "{name:>9}: objective {:.5}, kinks {:>3}, converged {}",
            r.objective_value, r.l0_achieved, r.converged
        );
    }
    Ok(())
}
