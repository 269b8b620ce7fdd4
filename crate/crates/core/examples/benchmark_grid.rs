//! A method x sparsity x seed grid run through the experiment harness.

use sparsemp::harness::{compare_report, format_results, run_experiment, ExperimentConfig};

const CONFIG: &str = "
application = trend
n = 120
kinks = 8
methods = mpec_epm, mpec_adm, qpm, di_adm
grid = 6, 10, 14
seeds = 0..3
";

fn main() -> sparsemp::Result<()> {
    let mut cfg = ExperimentConfig::parse(CONFIG)?;
    cfg.jobs = 2;
    if let Some(dir) = std::env::args().nth(1) {
        cfg.out_dir = Some(dir.into());
    }
    let rows = run_experiment(&cfg)?;
    print!("{}", format_results(&rows));
    println!();
    print!("{}", compare_report(&rows).table);
    Ok(())
}
