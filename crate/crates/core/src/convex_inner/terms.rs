//! Building blocks of a convex objective: smooth terms with gradients and
//! nonsmooth terms with proximal operators composed with affine maps.

use std::fmt::Debug;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::prox::{prox_hinge, prox_linf_compose, prox_tv_groups, TvNorm};
use crate::error::{check_len, Error, Result};
use crate::linops::{AffineMap, DenseMatrix};
use crate::vecops::{dot, norm_inf};

/// Exact Hessian of a quadratic smooth term.
#[derive(Debug, Clone)]
pub enum Hessian {
    ScaledIdentity(f64),
    Dense(Arc<DMatrix<f64>>),
}

/// Convex, differentiable term with Lipschitz gradient.
pub trait SmoothTerm: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    /// Overwrites `out` with the gradient at `x`.
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn gradient_lipschitz(&self) -> f64;
    /// Constant Hessian when the term is quadratic.
    fn hessian(&self) -> Option<Hessian> {
        None
    }
}

/// Convex function with a cheap proximal operator.
pub trait ProxFunction: Debug + Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, r: &[f64]) -> f64;
    /// `out = argmin_p g(p) + 1/(2 step) ||p - v||^2`.
    fn prox(&self, v: &[f64], step: f64, out: &mut [f64]);
}

/// `1/2 x^T H x + lin^T x + constant`.
#[derive(Debug, Clone)]
pub struct QuadraticTerm {
    hessian: Hessian,
    linear: Vec<f64>,
    constant: f64,
    lipschitz: f64,
}

impl QuadraticTerm {
    /// `scale/2 ||x - center||^2`.
    pub fn shifted_identity(scale: f64, center: &[f64]) -> Self {
        Self {
            hessian: Hessian::ScaledIdentity(scale),
            linear: center.iter().map(|c| -scale * c).collect(),
            constant: 0.5 * scale * dot(center, center),
            lipschitz: scale.abs(),
        }
    }

    /// General quadratic; `hessian` must be symmetric positive semidefinite.
    pub fn dense(hessian: DMatrix<f64>, linear: Vec<f64>, constant: f64) -> Result<Self> {
        let n = hessian.nrows();
        check_len(n, hessian.ncols())?;
        check_len(n, linear.len())?;
        let sym = (&hessian - hessian.transpose()).amax();
        if sym > 1e-10 * (1.0 + hessian.amax()) {
            return Err(Error::InvalidInput("hessian is not symmetric".into()));
        }
        let eig = hessian.clone().symmetric_eigenvalues();
        let lmax = eig.iter().cloned().fold(0.0_f64, f64::max);
        let lmin = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        if lmin < -1e-10 * (1.0 + lmax) {
            return Err(Error::InvalidInput(format!(
                "hessian is not positive semidefinite (smallest eigenvalue {lmin:.3e})"
            )));
        }
        Ok(Self {
            hessian: Hessian::Dense(Arc::new(hessian)),
            linear,
            constant,
            lipschitz: lmax,
        })
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    fn hess_apply(&self, x: &[f64], out: &mut [f64]) {
        match &self.hessian {
            Hessian::ScaledIdentity(s) => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = s * xi;
                }
            }
            Hessian::Dense(h) => {
                let hx = h.as_ref() * DVector::from_column_slice(x);
                out.copy_from_slice(hx.as_slice());
            }
        }
    }
}

impl SmoothTerm for QuadraticTerm {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut hx = vec![0.0; x.len()];
        self.hess_apply(x, &mut hx);
        0.5 * dot(x, &hx) + dot(&self.linear, x) + self.constant
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.hess_apply(x, out);
        for (o, l) in out.iter_mut().zip(&self.linear) {
            *o += l;
        }
    }

    fn gradient_lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn hessian(&self) -> Option<Hessian> {
        Some(self.hessian.clone())
    }
}

/// `lambda/2 ||x||^2 + sum_i log(1 + exp(r_i)) - r_i t_i`, `r = S x`, with
/// targets `t_i = (1 + y_i) / 2` for labels `y_i` in `{-1, +1}`.
#[derive(Debug, Clone)]
pub struct LogisticTerm {
    features: Arc<DenseMatrix>,
    targets: Vec<f64>,
    lambda: f64,
    lipschitz: f64,
}

impl LogisticTerm {
    pub fn new(features: Arc<DenseMatrix>, labels: &[f64], lambda: f64) -> Result<Self> {
        check_len(features.rows(), labels.len())?;
        let targets = labels.iter().map(|y| 0.5 * (1.0 + y)).collect();
        let s_norm = if features.rows() == 0 {
            0.0
        } else {
            AffineMap::dense(features.as_ref().clone()).spectral_norm()
        };
        Ok(Self {
            lipschitz: s_norm * s_norm / 4.0 + lambda,
            features,
            targets,
            lambda,
        })
    }
}

/// `log(1 + exp(r))` without overflow.
fn log1p_exp(r: f64) -> f64 {
    if r > 0.0 {
        r + (-r).exp().ln_1p()
    } else {
        r.exp().ln_1p()
    }
}

fn sigmoid(r: f64) -> f64 {
    if r >= 0.0 {
        1.0 / (1.0 + (-r).exp())
    } else {
        let e = r.exp();
        e / (1.0 + e)
    }
}

impl SmoothTerm for LogisticTerm {
    fn dim(&self) -> usize {
        self.features.cols()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut v = 0.5 * self.lambda * dot(x, x);
        for (i, t) in self.targets.iter().enumerate() {
            let r = dot(self.features.row(i), x);
            v += log1p_exp(r) - r * t;
        }
        v
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        let resid: Vec<f64> = self
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| sigmoid(dot(self.features.row(i), x)) - t)
            .collect();
        self.features.matvec_t(&resid, out);
        for (o, xi) in out.iter_mut().zip(x) {
            *o += self.lambda * xi;
        }
    }

    fn gradient_lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// `sum_i max(0, 1 - m_i)` over margins `m_i`.
#[derive(Debug, Clone)]
pub struct HingeLoss {
    dim: usize,
}

impl HingeLoss {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ProxFunction for HingeLoss {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, r: &[f64]) -> f64 {
        r.iter().map(|m| (1.0 - m).max(0.0)).sum()
    }

    fn prox(&self, v: &[f64], step: f64, out: &mut [f64]) {
        prox_hinge(v, step, out);
    }
}

/// `||r||_inf`.
#[derive(Debug, Clone)]
pub struct LinfNorm {
    dim: usize,
}

impl LinfNorm {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ProxFunction for LinfNorm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, r: &[f64]) -> f64 {
        norm_inf(r)
    }

    fn prox(&self, v: &[f64], step: f64, out: &mut [f64]) {
        prox_linf_compose(v, step, out);
    }
}

/// Indicator of the box `[lo, hi]^dim`.
///
/// `value` accepts points within `1e-5 (1 + max(|lo|, |hi|))` of the box so
/// that iterates of the splitting solver, which meet the box only up to its
/// residual tolerance, are not rejected as infeasible.
#[derive(Debug, Clone)]
pub struct BoxIndicator {
    dim: usize,
    lo: f64,
    hi: f64,
}

impl BoxIndicator {
    pub fn new(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidInput(format!("empty box [{lo}, {hi}]")));
        }
        Ok(Self { dim, lo, hi })
    }
}

impl ProxFunction for BoxIndicator {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, r: &[f64]) -> f64 {
        let slack = 1e-5 * (1.0 + self.lo.abs().max(self.hi.abs()));
        if r.iter()
            .all(|&v| v >= self.lo - slack && v <= self.hi + slack)
        {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn prox(&self, v: &[f64], _step: f64, out: &mut [f64]) {
        for (o, &x) in out.iter_mut().zip(v) {
            *o = x.clamp(self.lo, self.hi);
        }
    }
}

/// Total variation on stacked gradients `(gx; gy)` of `pixels` pixels.
#[derive(Debug, Clone)]
pub struct TotalVariation {
    pixels: usize,
    norm: TvNorm,
}

impl TotalVariation {
    pub fn new(pixels: usize, norm: TvNorm) -> Self {
        Self { pixels, norm }
    }
}

impl ProxFunction for TotalVariation {
    fn dim(&self) -> usize {
        2 * self.pixels
    }

    fn value(&self, r: &[f64]) -> f64 {
        let (gx, gy) = r.split_at(self.pixels);
        match self.norm {
            TvNorm::Anisotropic => r.iter().map(|v| v.abs()).sum(),
            TvNorm::Isotropic => gx.iter().zip(gy).map(|(a, b)| a.hypot(*b)).sum(),
        }
    }

    fn prox(&self, v: &[f64], step: f64, out: &mut [f64]) {
        let (gx, gy) = v.split_at(self.pixels);
        let (ox, oy) = out.split_at_mut(self.pixels);
        prox_tv_groups(gx, gy, step, self.norm, ox, oy);
    }
}

/// A prox-capable function evaluated at `map(x)`.
#[derive(Debug, Clone)]
pub struct ProxTerm {
    pub function: Arc<dyn ProxFunction>,
    pub map: AffineMap,
}

/// Convex objective `f(x) = sum smooth_j(x) + sum g_j(B_j x + c_j)` plus the
/// Lipschitz constant of `f` itself, which sets the exact-penalty threshold.
#[derive(Debug, Clone)]
pub struct ObjectiveSpec {
    dim: usize,
    smooth: Vec<Arc<dyn SmoothTerm>>,
    prox: Vec<ProxTerm>,
    lipschitz_f: f64,
}

impl ObjectiveSpec {
    pub fn new(dim: usize, lipschitz_f: f64) -> Self {
        Self {
            dim,
            smooth: Vec::new(),
            prox: Vec::new(),
            lipschitz_f,
        }
    }

    pub fn with_smooth(mut self, term: impl SmoothTerm + 'static) -> Result<Self> {
        check_len(self.dim, term.dim())?;
        self.smooth.push(Arc::new(term));
        Ok(self)
    }

    pub fn with_prox(
        mut self,
        function: impl ProxFunction + 'static,
        map: AffineMap,
    ) -> Result<Self> {
        check_len(self.dim, map.cols())?;
        check_len(function.dim(), map.rows())?;
        self.prox.push(ProxTerm {
            function: Arc::new(function),
            map,
        });
        Ok(self)
    }

    pub fn set_lipschitz_f(&mut self, l: f64) {
        self.lipschitz_f = l;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn smooth_terms(&self) -> &[Arc<dyn SmoothTerm>] {
        &self.smooth
    }

    pub fn prox_terms(&self) -> &[ProxTerm] {
        &self.prox
    }

    pub fn lipschitz_f(&self) -> f64 {
        self.lipschitz_f
    }

    pub fn is_smooth(&self) -> bool {
        self.prox.is_empty()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.smooth_value(x);
        for t in &self.prox {
            let r = t
                .map
                .apply(x)
                .expect("objective dimension checked at build");
            v += t.function.value(&r);
        }
        v
    }

    pub fn smooth_value(&self, x: &[f64]) -> f64 {
        self.smooth.iter().map(|t| t.value(x)).sum()
    }

    /// Overwrites `out` with the gradient of the smooth part.
    pub fn smooth_gradient(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut tmp = vec![0.0; self.dim];
        for t in &self.smooth {
            t.gradient(x, &mut tmp);
            for (o, g) in out.iter_mut().zip(&tmp) {
                *o += g;
            }
        }
    }

    /// Sum of the smooth terms' gradient Lipschitz constants.
    pub fn smooth_lipschitz(&self) -> f64 {
        self.smooth.iter().map(|t| t.gradient_lipschitz()).sum()
    }

    /// Combined Hessian when every smooth term is quadratic.
    pub fn quadratic_hessian(&self) -> Option<Hessian> {
        let mut scalar = 0.0;
        let mut dense: Option<DMatrix<f64>> = None;
        for t in &self.smooth {
            match t.hessian()? {
                Hessian::ScaledIdentity(s) => scalar += s,
                Hessian::Dense(h) => {
                    dense = Some(match dense {
                        Some(d) => d + h.as_ref(),
                        None => h.as_ref().clone(),
                    })
                }
            }
        }
        Some(match dense {
            Some(mut d) => {
                for i in 0..self.dim {
                    d[(i, i)] += scalar;
                }
                Hessian::Dense(Arc::new(d))
            }
            None => Hessian::ScaledIdentity(scalar),
        })
    }
}
