//! Outer square roots of nonnegative elements of `X`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modelspace::{rms_diff, KFun, ModelSpace};
use crate::{dft, linalg, C64};

/// Relative floor applied before taking logarithms.
pub const FLOOR: f64 = 1e-14;
/// Largest fraction of grid points that may be floored.
pub const MAX_FLOORED: f64 = 0.01;
/// Limit on `‖|g|² − f‖₁/‖f‖₁`.
pub const MODULUS_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct DyakonovRoot {
    /// The outer function `g ∈ K_θ` with `|g|² = f`.
    pub g: KFun,
    /// `‖|g|² − f‖₁/‖f‖₁` on the grid.
    pub modulus_residual: f64,
    /// Relative RMS distance from `K_θ` of the outer function built from the
    /// logarithm, before it is projected.
    pub membership_residual: f64,
    /// Fraction of grid points raised to the floor.
    pub floored_fraction: f64,
    /// Oversampling factor used for the logarithm.
    pub upsample: usize,
    /// Winding number of `g` around 0 on `|z| = 0.99`.
    pub winding: i64,
}

/// Outer function `g ∈ K_θ` with `|g|² = f`, for `f ≥ 0` on the grid with
/// `z̄θf ∈ H¹`.
pub fn dyakonov_root(space: &ModelSpace, f: &[f64]) -> Result<DyakonovRoot> {
    let n = space.grid_size();
    if f.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} samples, got {}", f.len())));
    }
    let max = f.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) || f.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("f must be finite and not identically zero".into()));
    }
    let min = f.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * max {
        return Err(Error::InvalidArgument(format!("f takes the negative value {min:.3e}")));
    }
    let l1 = f.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
    let shifted: Vec<C64> = f
        .iter()
        .zip(space.nodes().iter().zip(space.theta_samples()))
        .map(|(v, (t, th))| t.conj() * th * *v)
        .collect();
    let tail = dft::negative_tail(&shifted);
    if tail > 1e-8 * l1 {
        return Err(Error::InvalidArgument(format!(
            "z̄θf is not analytic: negative-frequency tail {tail:.3e}"
        )));
    }
    let floor = FLOOR * max;
    let floored_fraction = f.iter().filter(|&&v| v < floor).count() as f64 / n as f64;
    if floored_fraction > MAX_FLOORED {
        return Err(Error::IllConditioned(format!(
            "{:.2}% of the grid lies below the log floor",
            100.0 * floored_fraction
        )));
    }

    let data: Vec<C64> = f.iter().map(|&v| C64::new(v.max(0.0), 0.0)).collect();
    let mut best: Option<(f64, f64, usize, KFun)> = None;
    for factor in [1, 2, 4, 8, 16] {
        let raw = outer_from_modulus(&data, factor, floor);
        let g = space.project(&raw);
        let back = space.samples(&g);
        let rms = (raw.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64).sqrt();
        let membership = rms_diff(&raw, &back) / rms;
        let modulus = modulus_residual(&back, f, l1);
        // Sharp dips in f alias the logarithm; a finer grid helps both residuals.
        if best.as_ref().is_none_or(|b| modulus.max(membership) < b.0.max(b.1)) {
            best = Some((modulus, membership, factor, g));
        }
        if modulus < 1e-12 && membership < 1e-10 {
            break;
        }
    }
    let (mut modulus, membership_residual, upsample, mut g) = best.expect("at least one attempt");
    if modulus > 1e-13 {
        let polished = polish(space, &g, f);
        let m = modulus_residual(&space.samples(&polished), f, l1);
        if m < modulus {
            modulus = m;
            g = polished;
        }
    }
    if modulus > MODULUS_LIMIT {
        return Err(Error::tolerance("outer root modulus residual", modulus, MODULUS_LIMIT));
    }
    let winding = winding_number(space, &g, 0.99)?;
    if winding != 0 {
        return Err(Error::tolerance("outer root winding on |z| = 0.99", winding as f64, 0.0));
    }
    Ok(DyakonovRoot {
        g,
        modulus_residual: modulus,
        membership_residual,
        floored_fraction,
        upsample,
        winding,
    })
}

/// `exp(½(log f + i·conj(log f)))` on the grid, with the logarithm taken on a
/// grid `factor` times finer.
fn outer_from_modulus(data: &[C64], factor: usize, floor: f64) -> Vec<C64> {
    let fine = dft::upsample(data, factor);
    let logs: Vec<C64> = fine.iter().map(|v| C64::new(v.re.max(floor).ln(), 0.0)).collect();
    let big = logs.len();
    let mut c = dft::coefficients(&logs);
    // Re(c₀/2 + Σ_{m≥1} c_m z^m) = ½ log f.
    c[0] *= 0.5;
    for v in c[big / 2..].iter_mut() {
        *v = C64::new(0.0, 0.0);
    }
    dft::synthesize(&c).iter().step_by(factor).map(|v| v.exp()).collect()
}

fn modulus_residual(samples: &[C64], f: &[f64], l1: f64) -> f64 {
    let n = f.len() as f64;
    samples.iter().zip(f).map(|(g, v)| (g.norm_sqr() - v).abs()).sum::<f64>() / n / l1
}

/// Least-squares refinement of `Σ_j (|g(t_j)|² − f_j)²` over `g ∈ K_θ`.
fn polish(space: &ModelSpace, start: &KFun, f: &[f64]) -> KFun {
    let (coef, _) = linalg::fit_modulus(space.basis(), f, &start.coef, 60);
    space.kfun(coef)
}

/// Winding number of `g` around the origin along `|z| = radius`.
pub fn winding_number(space: &ModelSpace, g: &KFun, radius: f64) -> Result<i64> {
    let m = (4 * space.grid_size()).max(16384);
    let mut total = 0.0;
    let first = space.eval(g, C64::new(radius, 0.0));
    let mut prev = first;
    for j in 1..=m {
        let z = C64::from_polar(radius, std::f64::consts::TAU * j as f64 / m as f64);
        let v = if j == m { first } else { space.eval(g, z) };
        if v.norm() == 0.0 || prev.norm() == 0.0 {
            return Err(Error::IllConditioned("root vanishes on the winding contour".into()));
        }
        total += (v / prev).arg();
        prev = v;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}
