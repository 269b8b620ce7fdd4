//! CSV and plot-data files.
//!
//! `results.csv` columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `application` | problem family |
//! | `seed` | generator seed |
//! | `method` | solver name |
//! | `k` | sparsity level |
//! | `objective` | `f(x)` at the returned point |
//! | `l0` | `‖Ax + b‖₀` at the counting threshold |
//! | `gap` | complementarity gap (MPEC) or mass outside the top `k` (baselines) |
//! | `iterations` | outer iterations |
//! | `converged` | `true` / `false` |
//! | `snr0`, `snr1`, `snr2` | image metrics, empty elsewhere |
//!
//! Reals are written in the shortest form that parses back to the same
//! `f64`. Wall time lives in `timings.csv` so that `results.csv` is
//! byte-identical across repeated runs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mpec::TraceRecord;
use crate::problems::SnrMetrics;

pub const RESULTS_HEADER: &str =
    "application,seed,method,k,objective,l0,gap,iterations,converged,snr0,snr1,snr2";

/// One `(method, k, seed)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub application: String,
    pub seed: u64,
    pub method: String,
    pub k: f64,
    pub objective: f64,
    pub l0: usize,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub snr: Option<SnrMetrics>,
    /// Not part of `results.csv`; `None` for rows read back from it.
    pub wall_ms: Option<f64>,
}

pub fn format_results(rows: &[ResultRow]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in rows {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.application,
            r.seed,
            r.method,
            r.k,
            r.objective,
            r.l0,
            r.gap,
            r.iterations,
            r.converged
        );
        match r.snr {
            Some(m) => {
                let _ = writeln!(s, ",{},{},{}", m.snr0, m.snr1, m.snr2);
            }
            None => s.push_str(",,,\n"),
        }
    }
    s
}

pub fn write_results(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    std::fs::write(path, format_results(rows))?;
    Ok(())
}

fn field<T: std::str::FromStr>(line: usize, name: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {name} `{v}`"),
    })
}

pub fn parse_results(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == RESULTS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing results header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (i, raw) in lines {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = raw.split(',').collect();
        if f.len() != 12 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 12 fields, got {}", f.len()),
            });
        }
        let snr = if f[9].is_empty() && f[10].is_empty() && f[11].is_empty() {
            None
        } else {
            Some(SnrMetrics {
                snr0: field(line, "snr0", f[9])?,
                snr1: field(line, "snr1", f[10])?,
                snr2: field(line, "snr2", f[11])?,
            })
        };
        rows.push(ResultRow {
            application: f[0].to_string(),
            seed: field(line, "seed", f[1])?,
            method: f[2].to_string(),
            k: field(line, "k", f[3])?,
            objective: field(line, "objective", f[4])?,
            l0: field(line, "l0", f[5])?,
            gap: field(line, "gap", f[6])?,
            iterations: field(line, "iterations", f[7])?,
            converged: field(line, "converged", f[8])?,
            snr,
            wall_ms: None,
        });
    }
    Ok(rows)
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    parse_results(&std::fs::read_to_string(path)?)
}

/// `application,seed,method,k,wall_ms`.
pub fn write_timings(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let mut s = String::from("application,seed,method,k,wall_ms\n");
    for r in rows {
        let ms = r.wall_ms.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.application, r.seed, r.method, r.k, ms
        );
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Trace CSV: `# `-prefixed `header` lines, then
/// `iteration,objective,gap,penalty,wall_ms`.
pub fn format_trace(header: &str, trace: &[TraceRecord]) -> String {
    let mut s = String::new();
    for h in header.lines() {
        let _ = writeln!(s, "# {h}");
    }
    s.push_str("iteration,objective,gap,penalty,wall_ms\n");
    for t in trace {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            t.iteration, t.objective, t.gap, t.penalty, t.wall_ms
        );
    }
    s
}

pub fn write_trace(path: impl AsRef<Path>, header: &str, trace: &[TraceRecord]) -> Result<()> {
    std::fs::write(path, format_trace(header, trace))?;
    Ok(())
}

/// Whitespace-separated `k` versus mean objective over seeds, one column per
/// method in order of first appearance; `NaN` where a method has no row.
pub fn format_plot_data(rows: &[ResultRow]) -> String {
    let mut methods: Vec<&str> = Vec::new();
    let mut ks: Vec<f64> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
        if !ks.contains(&r.k) {
            ks.push(r.k);
        }
    }
    ks.sort_by(f64::total_cmp);
    let mut s = format!("# k {}\n", methods.join(" "));
    for &k in &ks {
        s.push_str(&k.to_string());
        for m in &methods {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.k == k && r.method == *m)
                .map(|r| r.objective)
                .collect();
            let mean = if vals.is_empty() {
                f64::NAN
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            };
            let _ = write!(s, " {mean}");
        }
        s.push('\n');
    }
    s
}

pub fn write_plot_data(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    std::fs::write(path, format_plot_data(rows))?;
    Ok(())
}
