//! Experiment runner behind the `sparsemp` binary: config files, solver
//! grids, result tables, traces and plot data.

mod config;
mod output;
mod report;
mod run;

pub use config::{
    Application, ClassificationSource, CliOverrides, ExperimentConfig, ImageSource, Method,
    MethodSettings, MrfSource, SeriesSource, SolverOverride, SparsityGrid, SEED_ENV,
};
pub use output::{
    format_plot_data, format_results, format_trace, parse_results, read_results, write_plot_data,
    write_results, write_timings, write_trace, ResultRow, RESULTS_HEADER,
};
pub use report::{compare_report, Report};
pub use run::{run_cells, run_experiment, solve_with, CellOutcome, Instance};
