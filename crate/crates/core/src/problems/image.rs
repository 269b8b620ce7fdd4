//! Grayscale images, impulse noise, l0-TV denoising and restoration metrics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex_inner::{ObjectiveSpec, TotalVariation, TvNorm};
use crate::error::{check_len, Error, Result};
use crate::linops::AffineMap;
use crate::mpec::SparsityProblem;

/// Row-major grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        check_len(height * width, pixels.len())?;
        Ok(Self {
            height,
            width,
            pixels,
        })
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ImageInstance {
    pub clean: GrayImage,
    pub noisy: GrayImage,
    pub noise_fraction: f64,
    /// Indices of the corrupted pixels, ascending.
    pub corrupted: Vec<usize>,
}

/// Random-value impulse noise: exactly `floor(fraction * N)` pixels, chosen
/// without replacement, are replaced by independent `U(0, 1)` values.
pub fn add_impulse_noise(clean: &GrayImage, fraction: f64, seed: u64) -> Result<ImageInstance> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidInput(format!(
            "noise fraction {fraction} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = (fraction * clean.len() as f64).floor() as usize;
    let mut corrupted = rand::seq::index::sample(&mut rng, clean.len(), count).into_vec();
    corrupted.sort_unstable();
    let mut noisy = clean.clone();
    for &i in &corrupted {
        let mut v: f64 = rng.random_range(0.0..1.0);
        // a replacement equal to the clean value would not be an impulse
        while v == clean.pixels[i] {
            v = rng.random_range(0.0..1.0);
        }
        noisy.pixels[i] = v;
    }
    Ok(ImageInstance {
        clean: clean.clone(),
        noisy,
        noise_fraction: fraction,
        corrupted,
    })
}

/// Piecewise-constant test image: a background plus a few random
/// axis-aligned rectangles and discs with distinct gray levels.
pub fn piecewise_constant_image(height: usize, width: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pixels = vec![rng.random_range(0.1..0.3); height * width];
    let shapes = 3 + rng.random_range(0..3);
    for s in 0..shapes {
        let level: f64 = rng.random_range(0.35..0.95);
        let ci = rng.random_range(0.0..height as f64);
        let cj = rng.random_range(0.0..width as f64);
        let ri = rng.random_range(0.15..0.35) * height as f64;
        let rj = rng.random_range(0.15..0.35) * width as f64;
        for i in 0..height {
            for j in 0..width {
                let (di, dj) = ((i as f64 - ci) / ri, (j as f64 - cj) / rj);
                let inside = if s % 2 == 0 {
                    di.abs() <= 1.0 && dj.abs() <= 1.0
                } else {
                    di * di + dj * dj <= 1.0
                };
                if inside {
                    pixels[i * width + j] = level;
                }
            }
        }
    }
    GrayImage {
        height,
        width,
        pixels,
    }
}

/// `min TV(x) s.t. ||x - noisy||_0 <= k` with TV the `p`-mixed norm of the
/// forward-difference gradient.
///
/// `L` bounds the Lipschitz constant of TV: `sqrt(8 N)` for `p = 2` and
/// `sqrt(16 N)` for `p = 1`, from `||grad|| <= sqrt(8)`.
pub fn build_l0tv(image: &ImageInstance, k: f64, p: u32) -> Result<SparsityProblem> {
    let norm = TvNorm::from_p(p)
        .ok_or_else(|| Error::InvalidInput(format!("TV exponent must be 1 or 2, got {p}")))?;
    let (h, w) = (image.noisy.height, image.noisy.width);
    let n = h * w;
    if !(k >= 0.0 && k < n as f64) {
        return Err(Error::InvalidInput(format!("k = {k} outside [0, {n})")));
    }
    let lipschitz = match norm {
        TvNorm::Isotropic => (8.0 * n as f64).sqrt(),
        TvNorm::Anisotropic => (16.0 * n as f64).sqrt(),
    };
    let obj = ObjectiveSpec::new(n, lipschitz)
        .with_prox(TotalVariation::new(n, norm), AffineMap::grad2d(h, w)?)?;
    let offset = image.noisy.pixels.iter().map(|v| -v).collect();
    let map = AffineMap::identity(n).with_offset(offset)?;
    SparsityProblem::new(obj, map, k)
}

/// Restoration quality of `x` against `clean`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrMetrics {
    /// Fraction of pixels within `2/255` of the reference.
    pub snr0: f64,
    /// `10 log10(||c - mean(c)||_1 / ||x - c||_1)`.
    pub snr1: f64,
    /// `10 log10(||c - mean(c)||_2^2 / ||x - c||_2^2)`.
    pub snr2: f64,
}

pub fn snr_metrics(x: &[f64], clean: &[f64]) -> Result<SnrMetrics> {
    check_len(clean.len(), x.len())?;
    if clean.is_empty() {
        return Err(Error::InvalidInput("empty image".into()));
    }
    let n = clean.len() as f64;
    let mean = clean.iter().sum::<f64>() / n;
    let thresh = 2.0 / 255.0;
    let differing = x
        .iter()
        .zip(clean)
        .filter(|(a, b)| (*a - *b).abs() > thresh)
        .count();
    let ratio = |num: f64, den: f64| {
        if den == 0.0 {
            f64::INFINITY
        } else {
            10.0 * (num / den).log10()
        }
    };
    let (mut n1, mut d1, mut n2, mut d2) = (0.0, 0.0, 0.0, 0.0);
    for (a, c) in x.iter().zip(clean) {
        n1 += (c - mean).abs();
        n2 += (c - mean) * (c - mean);
        d1 += (a - c).abs();
        d2 += (a - c) * (a - c);
    }
    Ok(SnrMetrics {
        snr0: 1.0 - differing as f64 / n,
        snr1: ratio(n1, d1),
        snr2: ratio(n2, d2),
    })
}
