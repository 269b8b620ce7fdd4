//! Piecewise-linear trend filtering `min 1/2 ||x - y||^2 s.t. ||D x||_0 <= k`
//! with `D` the second-difference operator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::convex_inner::{ObjectiveSpec, QuadraticTerm};
use crate::error::{Error, Result};
use crate::linops::AffineMap;
use crate::mpec::SparsityProblem;
use crate::vecops::dist2;

/// `L = ||l - y||` with `l` the least-squares line through `y`: every point
/// that beats the (feasible) line has gradient norm `||x - y||` at most this.
pub fn build_trend_filtering(series: &[f64], k: f64) -> Result<SparsityProblem> {
    let n = series.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "series of length {n} is too short"
        )));
    }
    if !(k >= 0.0 && k <= (n - 2) as f64) {
        return Err(Error::InvalidInput(format!(
            "k = {k} outside [0, {}]",
            n - 2
        )));
    }
    let line = least_squares_line(series);
    let lipschitz = dist2(&line, series).max(f64::EPSILON);
    let obj = ObjectiveSpec::new(n, lipschitz)
        .with_smooth(QuadraticTerm::shifted_identity(1.0, series))?;
    SparsityProblem::new(obj, AffineMap::second_difference(n)?, k)
}

fn least_squares_line(y: &[f64]) -> Vec<f64> {
    let n = y.len() as f64;
    let tm = (n - 1.0) / 2.0;
    let ym = y.iter().sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for (i, v) in y.iter().enumerate() {
        let t = i as f64 - tm;
        sty += t * (v - ym);
        stt += t * t;
    }
    let slope = sty / stt;
    (0..y.len()).map(|i| ym + slope * (i as f64 - tm)).collect()
}

/// Continuous piecewise-linear series with `kinks` random breakpoints,
/// slopes drawn from `N(0, 0.05^2)`, plus `N(0, noise^2)` noise.
pub fn generate_trend_series(n: usize, kinks: usize, noise: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut breaks: Vec<usize> = if n > 2 {
        rand::seq::index::sample(&mut rng, n - 2, kinks.min(n - 2))
            .into_iter()
            .map(|i| i + 1)
            .collect()
    } else {
        Vec::new()
    };
    breaks.sort_unstable();
    let mut slope: f64 = 0.05 * rng.sample::<f64, _>(StandardNormal);
    let mut level = 0.0;
    let mut out = Vec::with_capacity(n);
    let mut next = 0;
    for i in 0..n {
        if next < breaks.len() && breaks[next] == i {
            slope = 0.05 * rng.sample::<f64, _>(StandardNormal);
            next += 1;
        }
        out.push(level);
        level += slope;
    }
    for v in out.iter_mut() {
        *v += noise * rng.sample::<f64, _>(StandardNormal);
    }
    out
}
