//! Majorants of real elements of `X` built on the Clark grid `σ₁ ∪ σ₋₁`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::clark::clark_union_partition;
use crate::error::{Error, Result};
use crate::modelspace::ModelSpace;
use crate::{dft, C64};

/// Oversampling used for arc suprema; the retry multiplies it by four.
pub const OVERSAMPLING: usize = 32;

#[derive(Clone, Debug, Serialize)]
pub struct MajorantAtom {
    /// Left endpoint `t_n` of the arc.
    pub angle: f64,
    /// `sup |h|` over the arc.
    pub c: f64,
    /// `|θ'(t_n)|`.
    pub deriv: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Majorant {
    /// `g = D Σ c_n |k_{t_n}|²/|θ'(t_n)|²` on the grid.
    pub g: Vec<f64>,
    pub atoms: Vec<MajorantAtom>,
    pub d: f64,
    pub a_emp: f64,
    /// `‖g‖₁/‖h‖₁`.
    pub c_rep: f64,
    /// Oversampling that produced a valid majorant.
    pub oversampling: usize,
    /// `min_j (g_j − |h_j|)/max|h|`.
    pub margin: f64,
    /// Negative-frequency tail of `z̄θg` relative to `‖g‖₁`.
    pub membership_residual: f64,
}

/// `g ≥ |h|` in `X`, for real `h ∈ X` given on the grid. `d` defaults to
/// `1.01·max(1, π²A²/4)` with `A` the empirical derivative ratio on arcs.
pub fn majorant_clark(space: &ModelSpace, h: &[f64], d: Option<f64>) -> Result<Majorant> {
    let n = space.grid_size();
    if h.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} samples, got {}", h.len())));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("h has non-finite samples".into()));
    }
    let l1 = h.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
    let hc: Vec<C64> = h.iter().map(|&v| C64::new(v, 0.0)).collect();
    let shifted: Vec<C64> = hc
        .iter()
        .zip(space.nodes().iter().zip(space.theta_samples()))
        .map(|(v, (t, th))| t.conj() * th * v)
        .collect();
    let tail = dft::negative_tail(&shifted);
    if tail > 1e-8 * l1.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!("h is not in X: z̄θh has negative tail {tail:.3e}")));
    }
    let part = clark_union_partition(space.theta())?;
    let d = d.unwrap_or(1.01 * (PI * PI * part.a_emp * part.a_emp / 4.0).max(1.0));
    if !(d > 0.0) {
        return Err(Error::InvalidArgument(format!("D must be positive, got {d}")));
    }
    let hmax = h.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if hmax == 0.0 {
        return Ok(Majorant {
            g: vec![0.0; n],
            atoms: part
                .points
                .iter()
                .map(|p| MajorantAtom {
                    angle: p.angle,
                    c: 0.0,
                    deriv: p.deriv,
                })
                .collect(),
            d,
            a_emp: part.a_emp,
            c_rep: 0.0,
            oversampling: OVERSAMPLING,
            margin: 0.0,
            membership_residual: 0.0,
        });
    }
    let coefs = dft::coefficients(&hc);
    // |k_t|² on the grid for every partition point.
    let kernels: Vec<Vec<f64>> = part
        .points
        .iter()
        .map(|p| {
            let t = C64::from_polar(1.0, p.angle);
            let k = space.basis_at(t).map(|v| v.conj());
            (space.basis() * k).iter().map(|v| v.norm_sqr()).collect()
        })
        .collect();

    let mut last = None;
    for oversampling in [OVERSAMPLING, 4 * OVERSAMPLING] {
        let fine = dft::upsample(&hc, oversampling);
        let step = std::f64::consts::TAU / fine.len() as f64;
        let atoms: Vec<MajorantAtom> = (0..part.points.len())
            .map(|k| {
                let (a, b) = part.arc(k);
                let mut c = dft::eval_at(&coefs, a).re.abs().max(dft::eval_at(&coefs, b).re.abs());
                let lo = (a / step).ceil() as usize;
                let hi = (b / step).floor() as usize;
                for i in lo..=hi {
                    c = c.max(fine[i % fine.len()].re.abs());
                }
                MajorantAtom {
                    angle: part.points[k].angle,
                    c,
                    deriv: part.points[k].deriv,
                }
            })
            .collect();
        let mut g = vec![0.0; n];
        for (atom, kern) in atoms.iter().zip(&kernels) {
            let w = d * atom.c / (atom.deriv * atom.deriv);
            for (gj, kj) in g.iter_mut().zip(kern) {
                *gj += w * kj;
            }
        }
        let margin = g
            .iter()
            .zip(h)
            .map(|(gj, hj)| (gj - hj.abs()) / hmax)
            .fold(f64::INFINITY, f64::min);
        if margin >= -1e-9 {
            let gl1 = g.iter().sum::<f64>() / n as f64;
            let gc: Vec<C64> = g
                .iter()
                .zip(space.nodes().iter().zip(space.theta_samples()))
                .map(|(v, (t, th))| t.conj() * th * *v)
                .collect();
            return Ok(Majorant {
                membership_residual: dft::negative_tail(&gc) / gl1,
                c_rep: gl1 / l1,
                g,
                atoms,
                d,
                a_emp: part.a_emp,
                oversampling,
                margin,
            });
        }
        last = Some(margin);
    }
    Err(Error::tolerance(
        "majorant deficit min(g − |h|)/max|h|",
        -last.unwrap_or(0.0),
        1e-9,
    ))
}
