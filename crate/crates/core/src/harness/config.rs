//! Flat `key = value` experiment files.
//!
//! ```text
//! # synthetic trend filtering, three methods
//! application = trend
//! n = 300
//! kinks = 60
//! noise = 0.02
//! methods = mpec_epm, mpec_adm, qpm
//! grid = 10, 20, 30
//! seeds = 0..10
//! mpec_adm.alpha = 100
//! ```
//!
//! Solver keys without a prefix apply to every method that understands them;
//! `method.key` applies to one method only.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::baselines::{BaselineConfig, BaselineMethod};
use crate::error::{Error, Result};
use crate::mpec::SolverConfig;
use crate::problems::{Loss, DEFAULT_BOX_BOUND};

/// Environment variable consulted when neither the file nor the command line
/// sets a seed.
pub const SEED_ENV: &str = "SPARSEMP_SEED";

/// Every solver the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    MpecEpm,
    MpecAdm,
    Baseline(BaselineMethod),
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::MpecEpm,
        Method::MpecAdm,
        Method::Baseline(BaselineMethod::Greedy),
        Method::Baseline(BaselineMethod::Qpm),
        Method::Baseline(BaselineMethod::DiAdm),
        Method::Baseline(BaselineMethod::MdAdm),
        Method::Baseline(BaselineMethod::CvxSweep),
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::MpecEpm => "mpec_epm",
            Method::MpecAdm => "mpec_adm",
            Method::Baseline(b) => b.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

/// Where feature-selection data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassificationSource {
    Libsvm(PathBuf),
    Synthetic {
        samples: usize,
        n: usize,
        support: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeriesSource {
    File(PathBuf),
    Synthetic { n: usize, kinks: usize, noise: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MrfSource {
    /// Dense CSV Laplacian and one-value-per-line unaries.
    Files {
        laplacian: PathBuf,
        unary: PathBuf,
    },
    Synthetic {
        n: usize,
        density: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum ImageSource {
    Pgm(PathBuf),
    Synthetic { height: usize, width: usize },
}

/// Problem family plus its data or generator parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Application {
    /// `separation` switches to the well-separated generator.
    Quadratic {
        n: usize,
        diagonal: bool,
        separation: Option<f64>,
    },
    FeatureSelection {
        loss: Loss,
        source: ClassificationSource,
        lambda: f64,
        box_bound: f64,
    },
    Segmented {
        n: usize,
        sigma: f64,
    },
    Trend(SeriesSource),
    /// The sparsity level is fixed at `n` by the reformulation.
    Mrf(MrfSource),
    Image {
        source: ImageSource,
        noise_fraction: f64,
        p: u32,
    },
}

impl Application {
    pub fn name(&self) -> &'static str {
        match self {
            Application::Quadratic { .. } => "quadratic",
            Application::FeatureSelection { .. } => "feature_selection",
            Application::Segmented { .. } => "segmented",
            Application::Trend(_) => "trend",
            Application::Mrf(_) => "mrf",
            Application::Image { .. } => "l0tv",
        }
    }
}

/// Sparsity levels, either absolute or as fractions of the number of
/// constrained rows.
#[derive(Debug, Clone, PartialEq)]
pub enum SparsityGrid {
    Absolute(Vec<f64>),
    Fractional(Vec<f64>),
    /// Set by the application: MRF uses `k = n`, half the rows of its
    /// stacked `[I; I]` constraint.
    Fixed,
}

impl SparsityGrid {
    /// Absolute levels for a constraint with `rows` rows. Fractions round to
    /// the nearest integer, never below 1.
    pub fn resolve(&self, rows: usize) -> Vec<f64> {
        match self {
            SparsityGrid::Absolute(v) => v.clone(),
            SparsityGrid::Fractional(v) => v
                .iter()
                .map(|f| (f * rows as f64).round().max(1.0))
                .collect(),
            SparsityGrid::Fixed => vec![rows as f64 / 2.0],
        }
    }
}

/// A solver setting from the file, optionally scoped to one method.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOverride {
    pub method: Option<Method>,
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub application: Application,
    pub methods: Vec<Method>,
    pub grid: SparsityGrid,
    pub seeds: Vec<u64>,
    pub overrides: Vec<SolverOverride>,
    pub out_dir: Option<PathBuf>,
    /// Worker threads for independent cells.
    pub jobs: usize,
    /// Write one trace CSV per cell.
    pub traces: bool,
}

/// Command-line replacements for file values.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub methods: Option<Vec<Method>>,
    pub k: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
}

const MPEC_KEYS: [&str; 12] = [
    "rho0",
    "mu",
    "alpha",
    "eta",
    "penalty_cadence",
    "eps_gap",
    "eps_x",
    "max_outer",
    "rho_max",
    "sigma_tol",
    "inner_tol",
    "inner_max_iter",
];

const BASELINE_KEYS: [&str; 10] = [
    "penalty_growth",
    "cadence",
    "beta0",
    "lambda_grid",
    "eps",
    "eps_x",
    "max_iter",
    "inner_tol",
    "inner_max_iter",
    "polish",
];

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_num<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_num(line, key, s))
        .collect()
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(parse_err(
            line,
            format!("bad boolean `{value}` for `{key}`"),
        )),
    }
}

/// `a..b` (exclusive) or a comma list.
fn parse_seeds(line: usize, value: &str) -> Result<Vec<u64>> {
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = parse_num(line, "seeds", a.trim())?;
        let b: u64 = parse_num(line, "seeds", b.trim())?;
        if b <= a {
            return Err(parse_err(line, format!("empty seed range {a}..{b}")));
        }
        return Ok((a..b).collect());
    }
    parse_list(line, "seeds", value)
}

fn apply_mpec(cfg: &mut SolverConfig, key: &str, value: &str, line: usize) -> Result<bool> {
    match key {
        "rho0" => cfg.rho0 = parse_num(line, key, value)?,
        "mu" => cfg.mu = parse_num(line, key, value)?,
        "alpha" => cfg.alpha = parse_num(line, key, value)?,
        "eta" => cfg.eta = parse_num(line, key, value)?,
        "penalty_cadence" => cfg.penalty_cadence = parse_num(line, key, value)?,
        "eps_gap" => cfg.eps_gap = parse_num(line, key, value)?,
        "eps_x" => cfg.eps_x = parse_num(line, key, value)?,
        "max_outer" => cfg.max_outer = parse_num(line, key, value)?,
        "rho_max" => cfg.rho_max = parse_num(line, key, value)?,
        "sigma_tol" => cfg.sigma_tol = parse_num(line, key, value)?,
        "inner_tol" => cfg.inner_tol = parse_num(line, key, value)?,
        "inner_max_iter" => cfg.inner_max_iter = parse_num(line, key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn apply_baseline(cfg: &mut BaselineConfig, key: &str, value: &str, line: usize) -> Result<bool> {
    match key {
        "penalty_growth" => cfg.penalty_growth = parse_num(line, key, value)?,
        "cadence" => cfg.cadence = parse_num(line, key, value)?,
        "beta0" => cfg.beta0 = parse_num(line, key, value)?,
        "lambda_grid" => cfg.lambda_grid = parse_list(line, key, value)?,
        "eps" => cfg.eps = parse_num(line, key, value)?,
        "eps_x" => cfg.eps_x = parse_num(line, key, value)?,
        "max_iter" => cfg.max_iter = parse_num(line, key, value)?,
        "inner_tol" => cfg.inner_tol = parse_num(line, key, value)?,
        "inner_max_iter" => cfg.inner_max_iter = parse_num(line, key, value)?,
        "polish" => cfg.polish = parse_bool(line, key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

/// Remaining `key -> (line, value)` pairs; whatever is left after parsing is
/// an unknown key.
struct Entries(BTreeMap<String, (usize, String)>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.0.remove(key)
    }

    fn num<T: FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            Some((line, v)) => parse_num(line, key, &v),
            None => Ok(default),
        }
    }

    fn path(&mut self, key: &str) -> Option<PathBuf> {
        self.take(key).map(|(_, v)| PathBuf::from(v))
    }
}

fn parse_application(e: &mut Entries) -> Result<Application> {
    let (line, name) = e
        .take("application")
        .ok_or_else(|| Error::InvalidInput("missing key `application`".into()))?;
    let app = match name.as_str() {
        "quadratic" => Application::Quadratic {
            n: e.num("n", 64)?,
            diagonal: match e.take("diagonal") {
                Some((l, v)) => parse_bool(l, "diagonal", &v)?,
                None => false,
            },
            separation: match e.take("separation") {
                Some((l, v)) => Some(parse_num(l, "separation", &v)?),
                None => None,
            },
        },
        "feature_selection" => {
            let loss = match e.take("loss") {
                None => Loss::Logistic,
                Some((_, v)) if v == "logistic" => Loss::Logistic,
                Some((_, v)) if v == "hinge" => Loss::Hinge,
                Some((l, v)) => return Err(parse_err(l, format!("unknown loss `{v}`"))),
            };
            let source = match e.path("data") {
                Some(p) => ClassificationSource::Libsvm(p),
                None => {
                    let n = e.num("n", 100)?;
                    ClassificationSource::Synthetic {
                        samples: e.num("samples", 2 * n)?,
                        n,
                        support: e.num("support", (n / 10).max(1))?,
                    }
                }
            };
            Application::FeatureSelection {
                loss,
                source,
                lambda: e.num("lambda", 1e-2)?,
                box_bound: e.num("box_bound", DEFAULT_BOX_BOUND)?,
            }
        }
        "segmented" => Application::Segmented {
            n: e.num("n", 1024)?,
            sigma: e.num("sigma", 0.01)?,
        },
        "trend" => Application::Trend(match e.path("data") {
            Some(p) => SeriesSource::File(p),
            None => {
                let n = e.num("n", 300)?;
                SeriesSource::Synthetic {
                    n,
                    kinks: e.num("kinks", n / 5)?,
                    noise: e.num("noise", 0.02)?,
                }
            }
        }),
        "mrf" => Application::Mrf(match (e.path("laplacian"), e.path("unary")) {
            (Some(laplacian), Some(unary)) => MrfSource::Files { laplacian, unary },
            (None, None) => MrfSource::Synthetic {
                n: e.num("n", 12)?,
                density: e.num("density", 0.3)?,
            },
            _ => {
                return Err(Error::InvalidInput(
                    "`laplacian` and `unary` must be given together".into(),
                ))
            }
        }),
        "l0tv" => {
            let source = match e.path("data") {
                Some(p) => ImageSource::Pgm(p),
                None => ImageSource::Synthetic {
                    height: e.num("height", 32)?,
                    width: e.num("width", 32)?,
                },
            };
            let p: u32 = e.num("p", 1)?;
            if p != 1 && p != 2 {
                return Err(Error::InvalidInput(format!("p must be 1 or 2, got {p}")));
            }
            Application::Image {
                source,
                noise_fraction: e.num("noise_fraction", 0.3)?,
                p,
            }
        }
        other => return Err(parse_err(line, format!("unknown application `{other}`"))),
    };
    Ok(app)
}

impl ExperimentConfig {
    /// Parses a config file body. The seed falls back to `SPARSEMP_SEED`,
    /// then 0.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                parse_err(line, format!("expected `key = value`, got `{content}`"))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(parse_err(line, "empty key"));
            }
            if let Some((first, _)) = entries.insert(key.clone(), (line, value.trim().to_string()))
            {
                return Err(parse_err(
                    line,
                    format!("duplicate key `{key}` (first on line {first})"),
                ));
            }
        }
        let mut e = Entries(entries);

        let application = parse_application(&mut e)?;
        let methods = match e.take("methods") {
            Some((line, v)) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|err: Error| parse_err(line, err.to_string()))
                })
                .collect::<Result<Vec<Method>>>()?,
            None => Vec::new(),
        };
        let grid = match (e.take("grid"), e.take("grid_fraction")) {
            (Some(_), Some((line, _))) => {
                return Err(parse_err(line, "`grid` and `grid_fraction` are exclusive"))
            }
            (Some((line, v)), None) => SparsityGrid::Absolute(parse_list(line, "grid", &v)?),
            (None, Some((line, v))) => {
                SparsityGrid::Fractional(parse_list(line, "grid_fraction", &v)?)
            }
            (None, None) => match application {
                Application::Mrf(_) => SparsityGrid::Fixed,
                Application::FeatureSelection { .. } => {
                    SparsityGrid::Fractional(crate::problems::fractional_sparsity_grid())
                }
                _ => SparsityGrid::Absolute(Vec::new()),
            },
        };
        let seeds = match (e.take("seed"), e.take("seeds")) {
            (Some(_), Some((line, _))) => {
                return Err(parse_err(line, "`seed` and `seeds` are exclusive"))
            }
            (Some((line, v)), None) => vec![parse_num(line, "seed", &v)?],
            (None, Some((line, v))) => parse_seeds(line, &v)?,
            (None, None) => vec![env_seed()?.unwrap_or(0)],
        };
        let out_dir = e.path("out");
        let jobs = e.num("jobs", 1)?;
        let traces = match e.take("traces") {
            Some((line, v)) => parse_bool(line, "traces", &v)?,
            None => true,
        };

        // everything left is a solver setting or a mistake
        let mut overrides = Vec::new();
        for (key, (line, value)) in std::mem::take(&mut e.0) {
            let (method, bare) = match key.split_once('.') {
                Some((m, k)) => (
                    Some(
                        m.parse::<Method>()
                            .map_err(|err| parse_err(line, err.to_string()))?,
                    ),
                    k.to_string(),
                ),
                None => (None, key.clone()),
            };
            let known = match method {
                Some(Method::Baseline(_)) => BASELINE_KEYS.contains(&bare.as_str()),
                Some(_) => MPEC_KEYS.contains(&bare.as_str()),
                None => {
                    MPEC_KEYS.contains(&bare.as_str()) || BASELINE_KEYS.contains(&bare.as_str())
                }
            };
            if !known {
                return Err(parse_err(line, format!("unknown key `{key}`")));
            }
            overrides.push(SolverOverride {
                method,
                key: bare,
                value,
                line,
            });
        }
        // order: global settings first, then per-method ones, each by line
        overrides.sort_by_key(|o| (o.method.is_some(), o.line));

        let cfg = Self {
            application,
            methods,
            grid,
            seeds,
            overrides,
            out_dir,
            jobs,
            traces,
        };
        // surface bad values now rather than mid-run
        for m in Method::ALL {
            cfg.settings_for(m)?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Applies command-line values on top of the file.
    pub fn apply(&mut self, cli: &CliOverrides) {
        if let Some(m) = &cli.methods {
            self.methods = m.clone();
        }
        if let Some(k) = &cli.k {
            self.grid = SparsityGrid::Absolute(k.clone());
        }
        if let Some(s) = cli.seed {
            self.seeds = vec![s];
        }
        if let Some(o) = &cli.out {
            self.out_dir = Some(o.clone());
        }
        if let Some(j) = cli.jobs {
            self.jobs = j;
        }
    }

    /// Checks the invariants that only hold once overrides are in:
    /// at least one method, seed and grid value.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidInput("no methods selected".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidInput("no seeds selected".into()));
        }
        match (&self.grid, &self.application) {
            (SparsityGrid::Fixed, Application::Mrf(_)) => {}
            (SparsityGrid::Fixed, _) => {
                return Err(Error::InvalidInput(
                    "only mrf has a fixed sparsity level".into(),
                ))
            }
            (_, Application::Mrf(_)) => {
                return Err(Error::InvalidInput(
                    "mrf fixes the sparsity level; remove `grid`".into(),
                ))
            }
            (SparsityGrid::Absolute(v) | SparsityGrid::Fractional(v), _) if v.is_empty() => {
                return Err(Error::InvalidInput("missing key `grid`".into()))
            }
            (SparsityGrid::Fractional(v), _) if v.iter().any(|f| !(*f > 0.0 && *f < 1.0)) => {
                return Err(Error::InvalidInput(
                    "grid fractions must lie in (0, 1)".into(),
                ))
            }
            _ => {}
        }
        if self.jobs == 0 {
            return Err(Error::InvalidInput("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Solver settings for `method` after global and scoped overrides.
    pub fn settings_for(&self, method: Method) -> Result<MethodSettings> {
        match method {
            Method::Baseline(b) => {
                let mut cfg = BaselineConfig::new(b);
                for o in self.scoped(method) {
                    apply_baseline(&mut cfg, &o.key, &o.value, o.line)?;
                }
                Ok(MethodSettings::Baseline(cfg))
            }
            _ => {
                let mut cfg = SolverConfig::default();
                for o in self.scoped(method) {
                    apply_mpec(&mut cfg, &o.key, &o.value, o.line)?;
                }
                Ok(MethodSettings::Mpec(cfg))
            }
        }
    }

    fn scoped(&self, method: Method) -> impl Iterator<Item = &SolverOverride> {
        self.overrides
            .iter()
            .filter(move |o| o.method.is_none_or(|m| m == method))
    }
}

/// Resolved settings of one method.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSettings {
    Mpec(SolverConfig),
    Baseline(BaselineConfig),
}

impl MethodSettings {
    /// `key=value` pairs echoed at the top of trace files.
    pub fn header(&self) -> String {
        match self {
            MethodSettings::Mpec(c) => format!(
                "rho0={} mu={} alpha={} eta={} penalty_cadence={} max_outer={}",
                c.rho0, c.mu, c.alpha, c.eta, c.penalty_cadence, c.max_outer
            ),
            MethodSettings::Baseline(c) => format!(
                "beta0={} penalty_growth={} cadence={} max_iter={} polish={}",
                c.beta0, c.penalty_growth, c.cadence, c.max_iter, c.polish
            ),
        }
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidInput(format!("{SEED_ENV}=`{v}` is not a seed"))),
        Err(_) => Ok(None),
    }
}
