//! Per-`k` comparison table and winner counts.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::config::Method;
use super::output::ResultRow;

/// Objectives within this relative distance of the best count as ties.
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub table: String,
    /// `(method, wins)` in column order; ties share one win equally.
    pub wins: Vec<(String, f64)>,
}

impl Report {
    pub fn wins_of(&self, method: &str) -> f64 {
        self.wins
            .iter()
            .find(|(m, _)| m == method)
            .map_or(0.0, |(_, w)| *w)
    }
}

fn column_order(rows: &[ResultRow]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        if !names.contains(&r.method) {
            names.push(r.method.clone());
        }
    }
    // known methods in their canonical order, unknown ones after
    let rank = |n: &String| {
        Method::ALL
            .iter()
            .position(|m| m.name() == n)
            .unwrap_or(Method::ALL.len())
    };
    names.sort_by_key(rank);
    names
}

/// One contest per `(application, seed, k)`. Only rows with `l0 <= k` can
/// win; the best objective wins, and methods tied with it split the point.
/// Winning entries are marked `*`, infeasible ones `!`.
pub fn compare_report(rows: &[ResultRow]) -> Report {
    let methods = column_order(rows);
    let mut contests: BTreeMap<(String, u64, u64), Vec<&ResultRow>> = BTreeMap::new();
    for r in rows {
        // k keyed by its bits; grid values are nonnegative so the order is numeric
        contests
            .entry((r.application.clone(), r.seed, r.k.to_bits()))
            .or_default()
            .push(r);
    }

    let mut wins = vec![0.0; methods.len()];
    let mut table = String::new();
    let _ = write!(table, "{:<18} {:>6} {:>6}", "application", "seed", "k");
    for m in &methods {
        let _ = write!(table, " {m:>16}");
    }
    table.push('\n');

    for ((app, seed, kbits), entries) in &contests {
        let k = f64::from_bits(*kbits);
        let feasible = |r: &ResultRow| r.l0 as f64 <= k;
        let best = entries
            .iter()
            .filter(|r| feasible(r))
            .map(|r| r.objective)
            .fold(f64::INFINITY, f64::min);
        let winners: Vec<&str> = if best.is_finite() {
            entries
                .iter()
                .filter(|r| feasible(r))
                .filter(|r| r.objective <= best + TIE_TOL * (1.0 + best.abs()))
                .map(|r| r.method.as_str())
                .collect()
        } else {
            Vec::new()
        };
        for w in &winners {
            let i = methods.iter().position(|m| m == w).expect("known column");
            wins[i] += 1.0 / winners.len() as f64;
        }
        let _ = write!(table, "{app:<18} {seed:>6} {k:>6}");
        for m in &methods {
            let cell = match entries.iter().find(|r| &r.method == m) {
                None => "-".to_string(),
                Some(r) => {
                    let mark = if winners.contains(&m.as_str()) {
                        "*"
                    } else if r.l0 as f64 > k {
                        "!"
                    } else {
                        " "
                    };
                    format!("{:.6e}{mark}", r.objective)
                }
            };
            let _ = write!(table, " {cell:>16}");
        }
        table.push('\n');
    }

    table.push_str("\nwins:");
    for (m, w) in methods.iter().zip(&wins) {
        let _ = write!(table, " {m}={w}");
    }
    table.push('\n');
    Report {
        table,
        wins: methods.into_iter().zip(wins).collect(),
    }
}
