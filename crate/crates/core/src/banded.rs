//! Symmetric positive definite band matrices with an in-place Cholesky
//! factorization. Used for the normal equations of the splitting solver and
//! for inverse iteration on `A A^T`.

use crate::error::{Error, Result};

/// Lower band storage: entry `(i, j)` with `j <= i <= j + bw` lives at
/// `j * (bw + 1) + (i - j)`.
#[derive(Debug, Clone)]
pub struct BandedSym {
    n: usize,
    bw: usize,
    band: Vec<f64>,
}

impl BandedSym {
    pub fn zeros(n: usize, bw: usize) -> Self {
        let bw = bw.min(n.saturating_sub(1));
        Self {
            n,
            bw,
            band: vec![0.0; n * (bw + 1)],
        }
    }

    /// Builds from lower-triangle entries `(i, j, value)` with `i >= j`.
    pub fn from_lower_entries(n: usize, entries: &[(usize, usize, f64)]) -> Self {
        let bw = entries.iter().map(|&(i, j, _)| i - j).max().unwrap_or(0);
        let mut m = Self::zeros(n, bw);
        for &(i, j, v) in entries {
            m.band[j * (m.bw + 1) + (i - j)] += v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bw {
            0.0
        } else {
            self.band[j * (self.bw + 1) + (i - j)]
        }
    }

    /// `self * scale + shift * I`
    pub fn scaled_plus_identity(&self, scale: f64, shift: f64) -> Self {
        let mut out = self.clone();
        for v in out.band.iter_mut() {
            *v *= scale;
        }
        for j in 0..self.n {
            out.band[j * (self.bw + 1)] += shift;
        }
        out
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let w = self.bw + 1;
        for j in 0..self.n {
            let col = &self.band[j * w..(j + 1) * w];
            y[j] += col[0] * x[j];
            for (d, &v) in col.iter().enumerate().skip(1) {
                let i = j + d;
                if i >= self.n {
                    break;
                }
                y[i] += v * x[j];
                y[j] += v * x[i];
            }
        }
    }

    /// Elementwise sum; the result has the wider bandwidth.
    pub fn add(&self, other: &BandedSym) -> BandedSym {
        assert_eq!(self.n, other.n, "band sum dimension");
        let mut out = BandedSym::zeros(self.n, self.bw.max(other.bw));
        for src in [self, other] {
            let w = src.bw + 1;
            for j in 0..src.n {
                for d in 0..w.min(src.n - j) {
                    out.band[j * (out.bw + 1) + d] += src.band[j * w + d];
                }
            }
        }
        out
    }

    /// Principal submatrix on sorted, distinct `idx`.
    pub fn principal_submatrix(&self, idx: &[usize]) -> BandedSym {
        let mut entries = Vec::new();
        for (a, &i) in idx.iter().enumerate() {
            for b in (0..=a).rev() {
                let j = idx[b];
                if i - j > self.bw {
                    break;
                }
                let v = self.get(i, j);
                if v != 0.0 {
                    entries.push((a, b, v));
                }
            }
        }
        BandedSym::from_lower_entries(idx.len(), &entries)
    }

    /// Cholesky factorization `L L^T`; fails when a pivot is not positive
    /// relative to `rel_pivot_tol * max_diag`.
    pub fn cholesky(&self, rel_pivot_tol: f64) -> Result<BandCholesky> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = self.band.clone();
        let max_diag = (0..n).map(|j| self.band[j * w]).fold(0.0_f64, f64::max);
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            // diagonal
            let mut d = l[j * w];
            let k0 = j.saturating_sub(bw);
            for k in k0..j {
                let ljk = l[k * w + (j - k)];
                d -= ljk * ljk;
            }
            min_pivot = min_pivot.min(d);
            if !(d > rel_pivot_tol * max_diag.max(f64::MIN_POSITIVE)) {
                return Err(Error::RankDeficient { min_eig: d });
            }
            let djj = d.sqrt();
            l[j * w] = djj;
            // column below the diagonal
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                let mut s = l[j * w + (i - j)];
                let k0 = i.saturating_sub(bw);
                for k in k0..j {
                    s -= l[k * w + (i - k)] * l[k * w + (j - k)];
                }
                l[j * w + (i - j)] = s / djj;
            }
        }
        Ok(BandCholesky {
            n,
            bw,
            l,
            min_pivot,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
    #[allow(dead_code)]
    min_pivot: f64,
}

impl BandCholesky {
    /// Solves `L L^T x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let w = self.bw + 1;
        let n = self.n;
        // forward: L y = b
        for j in 0..n {
            b[j] /= self.l[j * w];
            let bj = b[j];
            let imax = (j + self.bw).min(n - 1);
            for i in (j + 1)..=imax {
                b[i] -= self.l[j * w + (i - j)] * bj;
            }
        }
        // backward: L^T x = y
        for j in (0..n).rev() {
            let imax = (j + self.bw).min(n - 1);
            let mut s = b[j];
            for i in (j + 1)..=imax {
                s -= self.l[j * w + (i - j)] * b[i];
            }
            b[j] = s / self.l[j * w];
        }
    }
}
