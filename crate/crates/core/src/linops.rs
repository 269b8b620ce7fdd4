//! Affine operators `x -> A x + b` for the constraint and objective maps.
//!
//! Every operator the applications need is covered by a handful of
//! structured kinds (identity, second differences, 2-D forward gradients,
//! vertical stacks) plus a dense fallback. All kinds provide an exact adjoint
//! and a way to assemble their Gram matrices in band form so the splitting
//! solver can factor its normal equations directly.

use std::path::Path;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::banded::BandedSym;
use crate::error::{check_len, Error, Result};
use crate::vecops::{dot, norm2};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_len(rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_len(c, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(self.row(i), x);
        }
    }

    pub fn matvec_t(&self, c: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, &ci) in c.iter().enumerate() {
            if ci != 0.0 {
                for (o, a) in out.iter_mut().zip(self.row(i)) {
                    *o += ci * a;
                }
            }
        }
    }
}

/// Structure of the linear part of an [`AffineMap`].
#[derive(Debug, Clone)]
pub enum MapKind {
    Dense(Arc<DenseMatrix>),
    Identity,
    /// Vertical concatenation of linear maps sharing a column count.
    Stacked(Vec<MapKind>),
    /// `(Dx)_i = x_i - 2 x_{i+1} + x_{i+2}`, `n - 2` rows.
    SecondDifference,
    /// Forward differences with replicate boundary on an `height x width`
    /// row-major image: horizontal differences first, then vertical.
    Grad2d {
        height: usize,
        width: usize,
    },
}

/// `x -> A x + offset`.
#[derive(Debug, Clone)]
pub struct AffineMap {
    rows: usize,
    cols: usize,
    offset: Vec<f64>,
    kind: MapKind,
}

impl AffineMap {
    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            offset: vec![0.0; n],
            kind: MapKind::Identity,
        }
    }

    pub fn dense(matrix: DenseMatrix) -> Self {
        Self {
            rows: matrix.rows,
            cols: matrix.cols,
            offset: vec![0.0; matrix.rows],
            kind: MapKind::Dense(Arc::new(matrix)),
        }
    }

    pub fn second_difference(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "second difference needs n >= 3, got {n}"
            )));
        }
        Ok(Self {
            rows: n - 2,
            cols: n,
            offset: vec![0.0; n - 2],
            kind: MapKind::SecondDifference,
        })
    }

    pub fn grad2d(height: usize, width: usize) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidInput("empty image grid".into()));
        }
        let n = height * width;
        Ok(Self {
            rows: 2 * n,
            cols: n,
            offset: vec![0.0; 2 * n],
            kind: MapKind::Grad2d { height, width },
        })
    }

    /// Stacks maps vertically; member offsets are concatenated.
    pub fn stacked(members: Vec<AffineMap>) -> Result<Self> {
        let cols = members
            .first()
            .map(|m| m.cols)
            .ok_or_else(|| Error::InvalidInput("empty stack".into()))?;
        let mut rows = 0;
        let mut offset = Vec::new();
        let mut kinds = Vec::with_capacity(members.len());
        for m in members {
            check_len(cols, m.cols)?;
            rows += m.rows;
            offset.extend_from_slice(&m.offset);
            kinds.push(m.kind);
        }
        Ok(Self {
            rows,
            cols,
            offset,
            kind: MapKind::Stacked(kinds),
        })
    }

    pub fn with_offset(mut self, offset: Vec<f64>) -> Result<Self> {
        check_len(self.rows, offset.len())?;
        self.offset = offset;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, MapKind::Identity)
    }

    /// `A x + offset`.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        self.apply_into(x, &mut out);
        Ok(out)
    }

    /// `A^T c` (offset ignored).
    pub fn adjoint(&self, c: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows, c.len())?;
        let mut out = vec![0.0; self.cols];
        self.adjoint_into(c, &mut out);
        Ok(out)
    }

    /// Unchecked `out = A x + offset`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        self.apply_linear_into(x, out);
        for (o, b) in out.iter_mut().zip(&self.offset) {
            *o += b;
        }
    }

    /// Unchecked `out = A x`.
    pub fn apply_linear_into(&self, x: &[f64], out: &mut [f64]) {
        kind_apply(&self.kind, self.cols, x, out);
    }

    /// Unchecked `out = A^T c`.
    pub fn adjoint_into(&self, c: &[f64], out: &mut [f64]) {
        kind_adjoint(&self.kind, self.cols, c, out);
    }

    /// Lower triangle of `A^T A` (n x n) in band form.
    pub fn column_gram(&self) -> BandedSym {
        if let MapKind::Dense(m) = &self.kind {
            let a = m.to_nalgebra();
            return dense_to_band(&(a.transpose() * &a));
        }
        let n = self.cols;
        let mut e = vec![0.0; n];
        let mut ae = vec![0.0; self.rows];
        let mut col = vec![0.0; n];
        let mut entries = Vec::new();
        for j in 0..n {
            e[j] = 1.0;
            self.apply_linear_into(&e, &mut ae);
            self.adjoint_into(&ae, &mut col);
            e[j] = 0.0;
            for (i, &v) in col.iter().enumerate().skip(j) {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        BandedSym::from_lower_entries(n, &entries)
    }

    /// Lower triangle of `A A^T` (m x m) in band form.
    pub fn row_gram(&self) -> BandedSym {
        if let MapKind::Dense(m) = &self.kind {
            let a = m.to_nalgebra();
            return dense_to_band(&(&a * a.transpose()));
        }
        let m = self.rows;
        let mut e = vec![0.0; m];
        let mut ate = vec![0.0; self.cols];
        let mut col = vec![0.0; m];
        let mut entries = Vec::new();
        for j in 0..m {
            e[j] = 1.0;
            self.adjoint_into(&e, &mut ate);
            self.apply_linear_into(&ate, &mut col);
            e[j] = 0.0;
            for (i, &v) in col.iter().enumerate().skip(j) {
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        BandedSym::from_lower_entries(m, &entries)
    }

    /// Largest singular value by power iteration on `A^T A`.
    pub fn spectral_norm(&self) -> f64 {
        match &self.kind {
            MapKind::Identity => return 1.0,
            MapKind::Stacked(kinds) if kinds.iter().all(|k| matches!(k, MapKind::Identity)) => {
                return (kinds.len() as f64).sqrt();
            }
            _ => {}
        }
        let n = self.cols;
        // deterministic, non-symmetric start vector
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i % 7) as f64).collect();
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let mut ax = vec![0.0; self.rows];
        let mut y = vec![0.0; n];
        let mut lambda = 0.0;
        for _ in 0..500 {
            self.apply_linear_into(&x, &mut ax);
            self.adjoint_into(&ax, &mut y);
            let next = norm2(&y);
            if next == 0.0 {
                return 0.0;
            }
            y.iter().zip(x.iter_mut()).for_each(|(a, b)| *b = a / next);
            if (next - lambda).abs() <= 1e-12 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// Smallest singular value `sigma(A)` of a full-row-rank map.
    ///
    /// Dense maps with `min(m, n) <= 512` use a full SVD; other kinds use a
    /// dense eigendecomposition of `A A^T` when `m <= 512` and inverse power
    /// iteration (banded Cholesky solves) beyond that.
    pub fn estimate_sigma_min(&self, tol: f64) -> Result<SpectralEstimate> {
        if self.is_identity() {
            return Ok(SpectralEstimate {
                sigma_min: 1.0,
                method: SpectralMethod::ExactSvd,
            });
        }
        if self.rows > self.cols {
            return Err(Error::RankDeficient { min_eig: 0.0 });
        }
        if let MapKind::Dense(m) = &self.kind {
            if self.rows.min(self.cols) <= DENSE_SVD_LIMIT {
                let svd = m.to_nalgebra().svd(false, false);
                let s = &svd.singular_values;
                let smax = s.iter().cloned().fold(0.0_f64, f64::max);
                let smin = s.iter().cloned().fold(f64::INFINITY, f64::min);
                if smin <= RANK_TOL.sqrt() * smax {
                    return Err(Error::RankDeficient {
                        min_eig: smin * smin,
                    });
                }
                return Ok(SpectralEstimate {
                    sigma_min: smin,
                    method: SpectralMethod::ExactSvd,
                });
            }
        }
        let gram = self.row_gram();
        if self.rows <= DENSE_SVD_LIMIT {
            let m = self.rows;
            let dense = DMatrix::from_fn(m, m, |i, j| gram.get(i, j));
            let eig = dense.symmetric_eigenvalues();
            let lmax = eig.iter().cloned().fold(0.0_f64, f64::max);
            let lmin = eig.iter().cloned().fold(f64::INFINITY, f64::min);
            if lmin <= RANK_TOL * lmax {
                return Err(Error::RankDeficient { min_eig: lmin });
            }
            return Ok(SpectralEstimate {
                sigma_min: lmin.sqrt(),
                method: SpectralMethod::ExactSvd,
            });
        }
        inverse_iteration(&gram, tol)
    }
}

const DENSE_SVD_LIMIT: usize = 512;
const RANK_TOL: f64 = 1e-12;

fn inverse_iteration(gram: &BandedSym, tol: f64) -> Result<SpectralEstimate> {
    let m = gram.dim();
    let chol = gram.cholesky(RANK_TOL)?;
    let mut x: Vec<f64> = (0..m).map(|i| 1.0 + 0.01 * (i % 5) as f64).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut lambda_inv = 0.0;
    let tol = tol.clamp(1e-14, 1e-2);
    for _ in 0..10_000 {
        let mut y = x.clone();
        chol.solve_in_place(&mut y);
        let ny = norm2(&y);
        // Rayleigh quotient of (AA^T)^{-1}
        let rq = dot(&x, &y);
        y.iter().zip(x.iter_mut()).for_each(|(a, b)| *b = a / ny);
        if (rq - lambda_inv).abs() <= tol * rq {
            lambda_inv = rq;
            break;
        }
        lambda_inv = rq;
    }
    Ok(SpectralEstimate {
        sigma_min: (1.0 / lambda_inv).sqrt(),
        method: SpectralMethod::InverseIteration,
    })
}

fn dense_to_band(m: &DMatrix<f64>) -> BandedSym {
    let n = m.nrows();
    let mut entries = Vec::new();
    for j in 0..n {
        for i in j..n {
            let v = m[(i, j)];
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    BandedSym::from_lower_entries(n, &entries)
}

fn kind_rows(kind: &MapKind, cols: usize) -> usize {
    match kind {
        MapKind::Dense(m) => m.rows,
        MapKind::Identity => cols,
        MapKind::Stacked(ks) => ks.iter().map(|k| kind_rows(k, cols)).sum(),
        MapKind::SecondDifference => cols - 2,
        MapKind::Grad2d { .. } => 2 * cols,
    }
}

fn kind_apply(kind: &MapKind, cols: usize, x: &[f64], out: &mut [f64]) {
    match kind {
        MapKind::Dense(m) => m.matvec(x, out),
        MapKind::Identity => out.copy_from_slice(x),
        MapKind::Stacked(ks) => {
            let mut start = 0;
            for k in ks {
                let r = kind_rows(k, cols);
                kind_apply(k, cols, x, &mut out[start..start + r]);
                start += r;
            }
        }
        MapKind::SecondDifference => {
            for (i, o) in out.iter_mut().enumerate() {
                *o = x[i] - 2.0 * x[i + 1] + x[i + 2];
            }
        }
        MapKind::Grad2d { height, width } => {
            let (h, w) = (*height, *width);
            let n = h * w;
            let (gx, gy) = out.split_at_mut(n);
            for i in 0..h {
                for j in 0..w {
                    let p = i * w + j;
                    gx[p] = if j + 1 < w { x[p + 1] - x[p] } else { 0.0 };
                    gy[p] = if i + 1 < h { x[p + w] - x[p] } else { 0.0 };
                }
            }
        }
    }
}

fn kind_adjoint(kind: &MapKind, cols: usize, c: &[f64], out: &mut [f64]) {
    match kind {
        MapKind::Dense(m) => m.matvec_t(c, out),
        MapKind::Identity => out.copy_from_slice(c),
        MapKind::Stacked(ks) => {
            out.iter_mut().for_each(|v| *v = 0.0);
            let mut tmp = vec![0.0; cols];
            let mut start = 0;
            for k in ks {
                let r = kind_rows(k, cols);
                kind_adjoint(k, cols, &c[start..start + r], &mut tmp);
                for (o, t) in out.iter_mut().zip(&tmp) {
                    *o += t;
                }
                start += r;
            }
        }
        MapKind::SecondDifference => {
            out.iter_mut().for_each(|v| *v = 0.0);
            for (i, &ci) in c.iter().enumerate() {
                out[i] += ci;
                out[i + 1] -= 2.0 * ci;
                out[i + 2] += ci;
            }
        }
        MapKind::Grad2d { height, width } => {
            let (h, w) = (*height, *width);
            let n = h * w;
            let (gx, gy) = c.split_at(n);
            out.iter_mut().for_each(|v| *v = 0.0);
            for i in 0..h {
                for j in 0..w {
                    let p = i * w + j;
                    if j + 1 < w {
                        out[p + 1] += gx[p];
                        out[p] -= gx[p];
                    }
                    if i + 1 < h {
                        out[p + w] += gy[p];
                        out[p] -= gy[p];
                    }
                }
            }
        }
    }
}

/// How a smallest-singular-value estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    ExactSvd,
    InverseIteration,
    UserSupplied,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub sigma_min: f64,
    pub method: SpectralMethod,
}

impl SpectralEstimate {
    pub fn user_supplied(sigma_min: f64) -> Self {
        Self {
            sigma_min,
            method: SpectralMethod::UserSupplied,
        }
    }
}

/// Loads a dense matrix from comma-separated rows (no header).
pub fn load_dense_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_dense_csv(&text)
}

pub fn parse_dense_csv(text: &str) -> Result<DenseMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("{tok:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: lineno + 1,
                    msg: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no rows".into(),
        });
    }
    DenseMatrix::from_rows(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sample_maps() -> Vec<AffineMap> {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dense = DenseMatrix::from_row_major(
            4,
            6,
            (0..24).map(|_| rng.random_range(-1.0..1.0)).collect(),
        )
        .unwrap();
        vec![
            AffineMap::identity(6),
            AffineMap::dense(dense),
            AffineMap::second_difference(6).unwrap(),
            AffineMap::grad2d(2, 3).unwrap(),
            AffineMap::stacked(vec![AffineMap::identity(6), AffineMap::identity(6)]).unwrap(),
        ]
    }

    #[test]
    fn apply_examples() {
        let d = AffineMap::second_difference(4).unwrap();
        assert_eq!(d.apply(&[1.0, 2.0, 3.0, 4.0]).unwrap(), vec![0.0, 0.0]);
        let id = AffineMap::identity(3);
        assert_eq!(id.apply(&[5.0, -1.0, 0.0]).unwrap(), vec![5.0, -1.0, 0.0]);
        let m = DenseMatrix::from_rows(&[vec![1.0, -2.0, 1.0, 0.0], vec![0.0, 1.0, -2.0, 1.0]])
            .unwrap();
        let a = AffineMap::dense(m);
        assert_eq!(a.apply(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn adjoint_examples() {
        let id = AffineMap::identity(2);
        assert_eq!(id.adjoint(&[3.0, 4.0]).unwrap(), vec![3.0, 4.0]);
        let d = AffineMap::second_difference(4).unwrap();
        assert_eq!(d.adjoint(&[1.0, 0.0]).unwrap(), vec![1.0, -2.0, 1.0, 0.0]);
        let s = AffineMap::stacked(vec![AffineMap::identity(3), AffineMap::identity(3)]).unwrap();
        assert_eq!(
            s.adjoint(&[1.0, 2.0, 3.0, 10.0, 20.0, 30.0]).unwrap(),
            vec![11.0, 22.0, 33.0]
        );
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let d = AffineMap::second_difference(4).unwrap();
        assert!(matches!(
            d.apply(&[1.0, 2.0]),
            Err(Error::DimensionMismatch {
                expected: 4,
                got: 2
            })
        ));
        assert!(d.adjoint(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn shapes_of_structured_kinds() {
        let d = AffineMap::second_difference(10).unwrap();
        assert_eq!((d.rows(), d.cols()), (8, 10));
        let g = AffineMap::grad2d(3, 5).unwrap();
        assert_eq!((g.rows(), g.cols()), (30, 15));
    }

    #[test]
    fn adjoint_consistency_all_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for map in sample_maps() {
            for _ in 0..100 {
                let x: Vec<f64> = (0..map.cols())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let c: Vec<f64> = (0..map.rows())
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect();
                let mut ax = vec![0.0; map.rows()];
                map.apply_linear_into(&x, &mut ax);
                let atc = map.adjoint(&c).unwrap();
                let lhs = dot(&ax, &c);
                let rhs = dot(&x, &atc);
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
            }
        }
    }

    #[test]
    fn stacked_apply_concatenates_members() {
        let d = AffineMap::second_difference(5)
            .unwrap()
            .with_offset(vec![1.0, 2.0, 3.0])
            .unwrap();
        let i = AffineMap::identity(5).with_offset(vec![-1.0; 5]).unwrap();
        let s = AffineMap::stacked(vec![d.clone(), i.clone()]).unwrap();
        let x = [0.5, -1.0, 2.0, 0.0, 3.0];
        let mut expect = d.apply(&x).unwrap();
        expect.extend(i.apply(&x).unwrap());
        assert_eq!(s.apply(&x).unwrap(), expect);
    }

    #[test]
    fn sigma_min_examples() {
        let id = AffineMap::identity(7).estimate_sigma_min(1e-9).unwrap();
        assert_eq!(id.sigma_min, 1.0);
        let d = AffineMap::second_difference(4).unwrap();
        let s = d.estimate_sigma_min(1e-9).unwrap();
        assert!((s.sigma_min - 2f64.sqrt()).abs() < 1e-12);
        let m = DenseMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0]]).unwrap();
        let s = AffineMap::dense(m).estimate_sigma_min(1e-9).unwrap();
        assert!((s.sigma_min - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_maps_are_rejected() {
        let s = AffineMap::stacked(vec![AffineMap::identity(3), AffineMap::identity(3)]).unwrap();
        assert!(matches!(
            s.estimate_sigma_min(1e-9),
            Err(Error::RankDeficient { .. })
        ));
        let g = AffineMap::grad2d(3, 3).unwrap();
        assert!(g.estimate_sigma_min(1e-9).is_err());
        let m = DenseMatrix::from_rows(&[vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert!(AffineMap::dense(m).estimate_sigma_min(1e-9).is_err());
    }

    #[test]
    fn inverse_iteration_matches_dense_eigen() {
        // 600 columns forces the banded inverse-iteration path
        let d = AffineMap::second_difference(600).unwrap();
        let est = d.estimate_sigma_min(1e-10).unwrap();
        assert_eq!(est.method, SpectralMethod::InverseIteration);
        let gram = d.row_gram();
        let m = gram.dim();
        let dense = DMatrix::from_fn(m, m, |i, j| gram.get(i, j));
        let lmin = dense
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!((est.sigma_min - lmin.sqrt()).abs() <= 1e-6 * lmin.sqrt());
    }

    #[test]
    fn column_gram_matches_probe() {
        for map in sample_maps() {
            let g = map.column_gram();
            let n = map.cols();
            let mut e = vec![0.0; n];
            let mut ae = vec![0.0; map.rows()];
            let mut col = vec![0.0; n];
            for j in 0..n {
                e[j] = 1.0;
                map.apply_linear_into(&e, &mut ae);
                map.adjoint_into(&ae, &mut col);
                e[j] = 0.0;
                for i in 0..n {
                    assert!((g.get(i, j) - col[i]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spectral_norm_of_second_difference_is_below_four() {
        let d = AffineMap::second_difference(50).unwrap();
        let s = d.spectral_norm();
        assert!(s < 4.0 && s > 3.9);
    }

    #[test]
    fn csv_loader_reports_line_numbers() {
        let m = parse_dense_csv("1,2\n3,4\n").unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(m.get(1, 0), 3.0);
        match parse_dense_csv("1,2\n3,x\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_dense_csv("1,2\n3\n").is_err());
    }
}
