//! Builds instances, runs every `(seed, k, method)` cell and writes outputs.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::config::{
    Application, ClassificationSource, ExperimentConfig, ImageSource, Method, MethodSettings,
    MrfSource, SeriesSource, SparsityGrid,
};
use super::output::{write_plot_data, write_results, write_timings, write_trace, ResultRow};
use crate::baselines::baseline_solve;
use crate::error::{Error, Result};
use crate::linops::load_dense_csv;
use crate::mpec::{adm_solve, epm_solve, SolveResult, SparsityProblem};
use crate::problems::io::{read_libsvm, read_pgm, read_series};
use crate::problems::{
    add_impulse_noise, build_feature_selection, build_l0tv, build_mrf, build_quadratic,
    build_segmented_regression, build_trend_filtering, generate_classification, generate_mrf,
    generate_quadratic, generate_segmented_regression_with_noise, generate_separated_quadratic,
    generate_trend_series, piecewise_constant_image, snr_metrics, FeatureSelectionData,
    ImageInstance, Loss, MrfInstance, QuadraticInstance, SegmentedRegressionInstance, SnrMetrics,
};

/// Data of one seed, ready to be turned into a problem for any `k`.
#[derive(Debug, Clone)]
pub enum Instance {
    Quadratic(QuadraticInstance),
    FeatureSelection {
        data: FeatureSelectionData,
        loss: Loss,
        box_bound: f64,
    },
    Segmented(SegmentedRegressionInstance),
    Trend(Vec<f64>),
    Mrf(MrfInstance),
    Image {
        image: ImageInstance,
        p: u32,
    },
}

impl Instance {
    /// Generates or loads the data of `app` for `seed`. File-backed data
    /// ignores the seed except for image noise.
    pub fn build(app: &Application, seed: u64) -> Result<Self> {
        Ok(match app {
            Application::Quadratic {
                n,
                diagonal,
                separation,
            } => Instance::Quadratic(match separation {
                Some(r) => generate_separated_quadratic(*n, seed, *r),
                None => generate_quadratic(*n, seed, *diagonal),
            }),
            Application::FeatureSelection {
                loss,
                source,
                lambda,
                box_bound,
            } => {
                let data = match source {
                    ClassificationSource::Libsvm(path) => {
                        let raw = read_libsvm(path)?;
                        let labels = raw.signed_labels();
                        FeatureSelectionData::new(raw.features, labels, *lambda)?
                    }
                    ClassificationSource::Synthetic {
                        samples,
                        n,
                        support,
                    } => generate_classification(*samples, *n, *support, *lambda, seed)?,
                };
                Instance::FeatureSelection {
                    data,
                    loss: *loss,
                    box_bound: *box_bound,
                }
            }
            Application::Segmented { n, sigma } => {
                Instance::Segmented(generate_segmented_regression_with_noise(*n, seed, *sigma)?)
            }
            Application::Trend(SeriesSource::File(path)) => Instance::Trend(read_series(path)?),
            Application::Trend(SeriesSource::Synthetic { n, kinks, noise }) => {
                Instance::Trend(generate_trend_series(*n, *kinks, *noise, seed))
            }
            Application::Mrf(MrfSource::Files { laplacian, unary }) => {
                let lap = load_dense_csv(laplacian)?.to_nalgebra();
                Instance::Mrf(build_mrf(lap, read_series(unary)?)?)
            }
            Application::Mrf(MrfSource::Synthetic { n, density }) => {
                Instance::Mrf(generate_mrf(*n, *density, seed)?)
            }
            Application::Image {
                source,
                noise_fraction,
                p,
            } => {
                let clean = match source {
                    ImageSource::Pgm(path) => read_pgm(path)?,
                    ImageSource::Synthetic { height, width } => {
                        piecewise_constant_image(*height, *width, seed)
                    }
                };
                Instance::Image {
                    image: add_impulse_noise(&clean, *noise_fraction, seed)?,
                    p: *p,
                }
            }
        })
    }

    /// Rows of the sparsity constraint.
    pub fn constraint_rows(&self) -> usize {
        match self {
            Instance::Quadratic(q) => q.center.len(),
            Instance::FeatureSelection { data, .. } => data.dim(),
            Instance::Segmented(s) => s.design.cols(),
            Instance::Trend(y) => y.len().saturating_sub(2),
            Instance::Mrf(m) => m.problem.constraint_map.rows(),
            Instance::Image { image, .. } => image.noisy.pixels.len(),
        }
    }

    pub fn problem(&self, k: f64) -> Result<SparsityProblem> {
        match self {
            Instance::Quadratic(q) => build_quadratic(q, k),
            Instance::FeatureSelection {
                data,
                loss,
                box_bound,
            } => build_feature_selection(data, *loss, k, *box_bound),
            Instance::Segmented(s) => build_segmented_regression(s, k),
            Instance::Trend(y) => build_trend_filtering(y, k),
            Instance::Mrf(m) => {
                if k != m.problem.k {
                    return Err(Error::InvalidInput(format!(
                        "mrf sparsity level is fixed at {}",
                        m.problem.k
                    )));
                }
                Ok(m.problem.clone())
            }
            Instance::Image { image, p } => build_l0tv(image, k, *p),
        }
    }

    /// Restoration metrics (images only).
    pub fn metrics(&self, x: &[f64]) -> Result<Option<SnrMetrics>> {
        match self {
            Instance::Image { image, .. } => Ok(Some(snr_metrics(x, &image.clean.pixels)?)),
            _ => Ok(None),
        }
    }
}

/// Runs `method` with its resolved settings.
pub fn solve_with(
    problem: &SparsityProblem,
    method: Method,
    settings: &MethodSettings,
) -> Result<SolveResult> {
    match (method, settings) {
        (Method::MpecEpm, MethodSettings::Mpec(c)) => epm_solve(problem, c),
        (Method::MpecAdm, MethodSettings::Mpec(c)) => adm_solve(problem, c),
        (Method::Baseline(_), MethodSettings::Baseline(c)) => baseline_solve(problem, c),
        _ => Err(Error::InvalidInput(format!(
            "settings do not match method {method}"
        ))),
    }
}

/// One finished cell.
#[derive(Debug, Clone)]
pub struct CellOutcome {
    pub row: ResultRow,
    pub result: SolveResult,
}

/// Runs every cell. Rows come back ordered by seed, then `k`, then method
/// in config order, independent of `jobs`.
pub fn run_cells(config: &ExperimentConfig) -> Result<Vec<CellOutcome>> {
    config.validate()?;
    let settings: Vec<MethodSettings> = config
        .methods
        .iter()
        .map(|&m| config.settings_for(m))
        .collect::<Result<_>>()?;
    let instances: Vec<Instance> = config
        .seeds
        .iter()
        .map(|&s| Instance::build(&config.application, s))
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (si, inst) in instances.iter().enumerate() {
        let grid = match (&config.grid, inst) {
            (SparsityGrid::Fixed, Instance::Mrf(m)) => vec![m.problem.k],
            (g, _) => g.resolve(inst.constraint_rows()),
        };
        for k in grid {
            for mi in 0..config.methods.len() {
                cells.push((si, k, mi));
            }
        }
    }

    let app = config.application.name();
    let run = |&(si, k, mi): &(usize, f64, usize)| -> Result<CellOutcome> {
        let inst = &instances[si];
        let method = config.methods[mi];
        let problem = inst.problem(k)?;
        let start = Instant::now();
        let result = solve_with(&problem, method, &settings[mi])?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        let row = ResultRow {
            application: app.to_string(),
            seed: config.seeds[si],
            method: method.name().to_string(),
            k,
            objective: result.objective_value,
            l0: result.l0_achieved,
            gap: result.complementarity_gap,
            iterations: result.outer_iterations,
            converged: result.converged,
            snr: inst.metrics(&result.x_final)?,
            wall_ms: Some(wall_ms),
        };
        log::info!(
            "{} k={} seed={} objective={} l0={} converged={}",
            row.method,
            row.k,
            row.seed,
            row.objective,
            row.l0,
            row.converged
        );
        Ok(CellOutcome { row, result })
    };

    if config.jobs <= 1 {
        cells.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().map(run).collect())
    }
}

/// Runs the experiment and, when `out_dir` is set, writes `results.csv`,
/// `timings.csv`, `plot_objective.dat` and `traces/*.csv` there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    let outcomes = run_cells(config)?;
    if let Some(dir) = &config.out_dir {
        write_outputs(config, &outcomes, dir)?;
    }
    Ok(outcomes.into_iter().map(|o| o.row).collect())
}

fn write_outputs(config: &ExperimentConfig, outcomes: &[CellOutcome], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let rows: Vec<ResultRow> = outcomes.iter().map(|o| o.row.clone()).collect();
    write_results(dir.join("results.csv"), &rows)?;
    write_timings(dir.join("timings.csv"), &rows)?;
    write_plot_data(dir.join("plot_objective.dat"), &rows)?;
    if config.traces {
        let tdir = dir.join("traces");
        std::fs::create_dir_all(&tdir)?;
        for o in outcomes {
            let method: Method = o.row.method.parse()?;
            let header = format!(
                "method={} k={} seed={}\n{}",
                o.row.method,
                o.row.k,
                o.row.seed,
                config.settings_for(method)?.header()
            );
            let name = format!("{}_k{}_seed{}.csv", o.row.method, o.row.k, o.row.seed);
            write_trace(tdir.join(name), &header, &o.result.trace)?;
        }
    }
    Ok(())
}
