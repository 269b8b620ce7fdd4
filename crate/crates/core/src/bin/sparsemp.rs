use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sparsemp::harness::{
    compare_report, read_results, run_experiment, CliOverrides, ExperimentConfig, Method,
    ResultRow, SparsityGrid,
};

/// Cardinality-constrained optimization experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem with one method.
    Solve(RunArgs),
    /// Run every method over a sparsity grid and seeds.
    Bench(RunArgs),
    /// Summarize results.csv files.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Experiment file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extra `key=value` setting; replaces the file's value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    method: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    /// Falls back to SPARSEMP_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let file = match &args.config {
        Some(p) => std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => String::new(),
    };
    let mut sets = Vec::new();
    for s in &args.set {
        let (k, v) = s
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got `{s}`"))?;
        sets.push((k.trim().to_string(), v.trim().to_string()));
    }
    // blank out overridden lines so the remaining line numbers stay right
    let mut text: String = file
        .lines()
        .map(|l| {
            let key = l
                .split('#')
                .next()
                .unwrap_or("")
                .split('=')
                .next()
                .unwrap_or("")
                .trim();
            if sets.iter().any(|(k, _)| k == key) {
                ""
            } else {
                l
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    for (k, v) in &sets {
        text.push_str(&format!("\n{k} = {v}"));
    }
    let mut cfg = ExperimentConfig::parse(&text).map_err(|e| e.to_string())?;
    let methods = match &args.method {
        Some(names) => Some(
            names
                .iter()
                .map(|n| n.parse::<Method>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?,
        ),
        None => None,
    };
    cfg.apply(&CliOverrides {
        methods,
        k: args.k.clone(),
        seed: args.seed,
        out: args.out.clone(),
        jobs: args.jobs,
    });
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn status(rows: &[ResultRow]) -> ExitCode {
    let unconverged = rows.iter().filter(|r| !r.converged).count();
    if unconverged > 0 {
        eprintln!("{unconverged} of {} cells did not converge", rows.len());
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve(args) => {
            let cfg = load(&args)?;
            let ks = match &cfg.grid {
                SparsityGrid::Absolute(v) | SparsityGrid::Fractional(v) => v.len(),
                SparsityGrid::Fixed => 1,
            };
            if cfg.seeds.len() * cfg.methods.len() * ks != 1 {
                return Err(
                    "solve runs one method at one k and one seed; use bench for grids".into(),
                );
            }
            let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
            for r in &rows {
                println!(
                    "{} k={} seed={}: objective {} l0 {} gap {:e} iterations {} converged {}",
                    r.method, r.k, r.seed, r.objective, r.l0, r.gap, r.iterations, r.converged
                );
                if let Some(m) = r.snr {
                    println!("snr0 {} snr1 {} snr2 {}", m.snr0, m.snr1, m.snr2);
                }
            }
            Ok(status(&rows))
        }
        Command::Bench(args) => {
            let mut cfg = load(&args)?;
            if cfg.out_dir.is_none() {
                cfg.out_dir = Some(PathBuf::from("sparsemp-out"));
            }
            let rows = run_experiment(&cfg).map_err(|e| e.to_string())?;
            print!("{}", compare_report(&rows).table);
            if let Some(dir) = &cfg.out_dir {
                eprintln!("wrote {}", dir.join("results.csv").display());
            }
            Ok(status(&rows))
        }
        Command::Report { files } => {
            let mut rows = Vec::new();
            for f in &files {
                rows.extend(read_results(f).map_err(|e| format!("{}: {e}", f.display()))?);
            }
            print!("{}", compare_report(&rows).table);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
