//! Closed-form proximal operators for the nonsmooth losses and regularizers.

use crate::projections::capped_simplex_project;
use crate::vecops::{norm1, soft_threshold};

/// Prox of `step * max(0, 1 - m)` applied to each margin.
pub fn prox_hinge(margins: &[f64], step: f64, out: &mut [f64]) {
    for (o, &m) in out.iter_mut().zip(margins) {
        *o = if m >= 1.0 {
            m
        } else if m <= 1.0 - step {
            m + step
        } else {
            1.0
        };
    }
}

/// Prox of `step * ||.||_inf` by Moreau decomposition:
/// `r - step * P_{||.||_1 <= 1}(r / step)`.
pub fn prox_linf_compose(r: &[f64], step: f64, out: &mut [f64]) {
    if norm1(r) <= step {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    let scaled: Vec<f64> = r.iter().map(|v| v / step).collect();
    // The unit l1 ball lies inside the unit box, so the capped projection
    // with budget 1 is the plain l1-ball projection.
    let proj = capped_simplex_project(&scaled, 1.0).expect("budget 1 is valid");
    for ((o, &ri), pi) in out.iter_mut().zip(r).zip(proj) {
        *o = ri - step * pi;
    }
}

/// Total-variation shrinkage on gradient pairs. `p = 1` soft-thresholds each
/// component, `p = 2` shrinks each `(gx_i, gy_i)` pair as a group.
pub fn prox_tv_groups(
    gx: &[f64],
    gy: &[f64],
    step: f64,
    p: TvNorm,
    ox: &mut [f64],
    oy: &mut [f64],
) {
    match p {
        TvNorm::Anisotropic => {
            for (o, &g) in ox.iter_mut().zip(gx) {
                *o = soft_threshold(g, step);
            }
            for (o, &g) in oy.iter_mut().zip(gy) {
                *o = soft_threshold(g, step);
            }
        }
        TvNorm::Isotropic => {
            for i in 0..gx.len() {
                let norm = gx[i].hypot(gy[i]);
                let scale = if norm > step { 1.0 - step / norm } else { 0.0 };
                ox[i] = scale * gx[i];
                oy[i] = scale * gy[i];
            }
        }
    }
}

/// Which mixed norm the total variation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TvNorm {
    /// `p = 1`: sum of absolute differences.
    Anisotropic,
    /// `p = 2`: sum of per-pixel gradient magnitudes.
    Isotropic,
}

impl TvNorm {
    pub fn from_p(p: u32) -> Option<Self> {
        match p {
            1 => Some(Self::Anisotropic),
            2 => Some(Self::Isotropic),
            _ => None,
        }
    }

    pub fn p(self) -> u32 {
        match self {
            Self::Anisotropic => 1,
            Self::Isotropic => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hinge_cases() {
        let mut out = [0.0; 3];
        prox_hinge(&[2.0, -1.0, 1.0], 0.5, &mut out);
        assert_eq!(out, [2.0, -0.5, 1.0]);
        prox_hinge(&[0.8], 0.5, &mut out[..1]);
        assert_eq!(out[0], 1.0);
    }

    #[test]
    fn linf_cases() {
        let mut out = [9.0; 2];
        prox_linf_compose(&[0.5, -0.2], 1.0, &mut out);
        assert_eq!(out, [0.0, 0.0]);
        prox_linf_compose(&[3.0, 0.0], 1.0, &mut out);
        assert!((out[0] - 2.0).abs() < 1e-14 && out[1] == 0.0);
        prox_linf_compose(&[0.0, 0.0], 0.3, &mut out);
        assert_eq!(out, [0.0, 0.0]);
    }

    #[test]
    fn tv_cases() {
        let (mut ox, mut oy) = ([0.0], [0.0]);
        prox_tv_groups(&[3.0], &[4.0], 5.0, TvNorm::Isotropic, &mut ox, &mut oy);
        assert_eq!((ox[0], oy[0]), (0.0, 0.0));
        prox_tv_groups(&[3.0], &[4.0], 2.5, TvNorm::Isotropic, &mut ox, &mut oy);
        assert!((ox[0] - 1.5).abs() < 1e-14 && (oy[0] - 2.0).abs() < 1e-14);
        prox_tv_groups(&[-2.0], &[0.0], 1.0, TvNorm::Anisotropic, &mut ox, &mut oy);
        assert_eq!(ox[0], -1.0);
    }
}
