//! Lebesgue and Sobolev norms.
//!
//! Convention: non-normalized Lebesgue measure on `[0, 2 pi)^2`. `L^p` for
//! `p != 2, inf` is evaluated by equal-weight quadrature on the sample
//! lattice (spectrally accurate for band-limited fields); `H^s` norms are
//! spectral sums; `H^{-1}` requires a mean-zero field.

use crate::error::{Error, Result};
use crate::field::Field2;
use crate::grid::TWO_PI;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Default)]
pub struct NormReport {
    /// `p -> ||u||_{L^p}` (key is the exponent formatted with `fmt_exp`).
    pub lp: BTreeMap<String, f64>,
    /// `s -> ||u||_{H^s}` (homogeneous).
    pub sobolev: BTreeMap<String, f64>,
    /// `||grad u||_{L^inf}` when requested.
    pub linf_grad: Option<f64>,
}

pub fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

/// `||u||_{L^p}` by lattice quadrature (`p = inf` gives the max).
pub fn lp_norm(field: &Field2, p: f64) -> f64 {
    let mag = field.magnitude_physical();
    if p.is_infinite() {
        return mag.into_iter().fold(0.0, f64::max);
    }
    if p == 2.0 {
        return field.l2_norm();
    }
    let w = field.grid().dx() * field.grid().dx();
    let sum: f64 = mag.iter().map(|m| m.powf(p)).sum();
    (sum * w).powf(1.0 / p)
}

/// Homogeneous Sobolev norm `||u||_{H^s}`; `s < 0` demands mean zero.
pub fn sobolev_norm(field: &Field2, s: f64) -> Result<f64> {
    if s < 0.0 {
        let m = (0..field.ncomp()).map(|c| field.mean(c).norm()).fold(0.0, f64::max);
        if m > 1e-10 * (1.0 + field.l2_norm()) {
            return Err(Error::NonZeroMean(m));
        }
    }
    let g = field.grid();
    let n = g.n();
    let mut acc = 0.0;
    for c in 0..field.ncomp() {
        let coeffs = field.coeffs(c);
        for by in 0..n {
            let ky = g.freq(by) as f64;
            for bx in 0..n {
                let kx = g.freq(bx) as f64;
                let k2 = kx * kx + ky * ky;
                if k2 == 0.0 {
                    continue;
                }
                acc += k2.powf(s) * coeffs[by * n + bx].norm_sqr();
            }
        }
    }
    Ok((acc * TWO_PI * TWO_PI).sqrt())
}

/// `||grad u||_{L^inf}`: pointwise Euclidean norm over all component
/// gradients.
pub fn linf_grad(field: &Field2) -> f64 {
    let mut parts = Vec::new();
    for c in 0..field.ncomp() {
        let grad = field.component(c).gradient().expect("scalar component");
        parts.push(grad.to_physical(0));
        parts.push(grad.to_physical(1));
    }
    (0..field.grid().len())
        .map(|i| parts.iter().map(|p| p[i] * p[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
}

/// Norm report for the requested exponents.
pub fn norms(
    field: &Field2,
    lp_exponents: &[f64],
    sobolev_exponents: &[f64],
    want_linf_grad: bool,
) -> Result<NormReport> {
    let mut report = NormReport::default();
    for &p in lp_exponents {
        report.lp.insert(fmt_exp(p), lp_norm(field, p));
    }
    for &s in sobolev_exponents {
        report.sobolev.insert(fmt_exp(s), sobolev_norm(field, s)?);
    }
    if want_linf_grad {
        report.linf_grad = Some(linf_grad(field));
    }
    Ok(report)
}

/// Declared conversion from a 2-D norm of a 2.5-D field to its 3-D value:
/// the field is constant along the third axis, so `||u||_{L^p(T^3)} =
/// ||u||_{L^p(T^2)} * (2 pi)^{1/p}`.
pub fn as_3d_lp(value_2d: f64, p: f64) -> f64 {
    if p.is_infinite() {
        value_2d
    } else {
        value_2d * TWO_PI.powf(1.0 / p)
    }
}
