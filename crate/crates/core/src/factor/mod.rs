//! Four-term factorization of `K¹_{θ²/z}` and the tools behind it: outer
//! square roots, Clark-grid majorants, `X`-norm bounds, and the Paley–Wiener
//! analogue on the line.

mod dyakonov;
mod majorant;
mod paley_wiener;
mod xnorm;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use dyakonov::{dyakonov_root, winding_number, DyakonovRoot};
pub use majorant::{majorant_clark, Majorant, MajorantAtom};
pub use paley_wiener::{pw_factorize, pw_majorant, LineGrid, PwFactorization, PwKernel, PwFunction, PwMajorant, PwPair};
pub use xnorm::{xnorm_bounds, XNormBounds};

use crate::error::{Error, Result};
use crate::modelspace::{KFun, ModelSpace};
use crate::tto::Crofoot;
use crate::{cplx, dft, C64};

/// Limit on `residual_rel`.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorPair {
    pub x: KFun,
    pub y: KFun,
}

/// A nonnegative piece `P_k` of `zθ̄f = Σ ζ_k P_k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "cplx::pair")]
    pub zeta: C64,
    /// `‖P_k‖₁`.
    pub l1: f64,
    pub modulus_residual: f64,
    pub membership_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub theta_id: String,
    pub pairs: Vec<FactorPair>,
    /// `Σ ‖x_k‖₂‖y_k‖₂`.
    pub constant: f64,
    /// `‖f − Σ x_k y_k‖₁/‖f‖₁` on the grid.
    pub residual_rel: f64,
    /// `‖f‖₁`.
    pub f_l1: f64,
    pub pieces: Vec<Piece>,
    /// Largest `C_rep` among the majorants used.
    pub c_rep: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage_timings: Option<Vec<StageTiming>>,
}

impl FactorizationResult {
    /// `Σ x_k y_k` on the grid.
    pub fn reassemble(&self, space: &ModelSpace) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); space.grid_size()];
        for p in &self.pairs {
            let xs = space.samples(&p.x);
            let ys = space.samples(&p.y);
            for ((o, a), b) in out.iter_mut().zip(&xs).zip(&ys) {
                *o += a * b;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct FactorOptions {
    /// Record wall-clock time per stage. Off by default so output is reproducible.
    pub timings: bool,
}

/// `f = Σ_{k≤4} x_k y_k` with `x_k, y_k ∈ K_θ`, for `f ∈ K¹_{θ²/z}` on the grid.
pub fn factorize4(space: &ModelSpace, f: &[C64]) -> Result<FactorizationResult> {
    factorize4_with(space, f, &FactorOptions::default())
}

pub fn factorize4_with(space: &ModelSpace, f: &[C64], opts: &FactorOptions) -> Result<FactorizationResult> {
    check_membership(space, f).map_err(|e| e.in_stage("membership"))?;
    let w = space.theta().value(C64::new(0.0, 0.0));
    if w.norm() <= 1e-14 {
        return factorize_centered(space, f, opts);
    }
    // Move to Θ = (θ − w)/(1 − w̄θ), which vanishes at 0, and back.
    let started = Instant::now();
    let crofoot = Crofoot::new(space, w).map_err(|e| e.in_stage("crofoot"))?;
    let s = 1.0 - w.norm_sqr();
    let moved: Vec<C64> = f
        .iter()
        .zip(space.theta_samples())
        .map(|(v, th)| {
            let q = C64::new(1.0, 0.0) - w.conj() * th;
            v * s / (q * q)
        })
        .collect();
    let inner = factorize_centered(&crofoot.target, &moved, opts)?;
    let pairs: Vec<FactorPair> = inner
        .pairs
        .iter()
        .map(|p| FactorPair {
            x: crofoot.unmap(space, &p.x),
            y: crofoot.unmap(space, &p.y),
        })
        .collect();
    let mut out = FactorizationResult {
        theta_id: space.theta_id().to_string(),
        constant: pairs.iter().map(|p| p.x.norm() * p.y.norm()).sum(),
        pairs,
        residual_rel: 0.0,
        f_l1: ModelSpace::l1_norm(f),
        pieces: inner.pieces,
        c_rep: inner.c_rep,
        stage_timings: inner.stage_timings,
    };
    out.residual_rel = relative_residual(f, &out.reassemble(space), out.f_l1);
    if let Some(t) = out.stage_timings.as_mut() {
        t.push(StageTiming {
            stage: "crofoot".into(),
            seconds: started.elapsed().as_secs_f64(),
        });
    }
    if out.residual_rel > RESIDUAL_LIMIT {
        return Err(Error::tolerance("factorization residual", out.residual_rel, RESIDUAL_LIMIT).in_stage("crofoot"));
    }
    Ok(out)
}

/// `f` analytic and `z̄²θ²f̄` analytic, up to `1e−8‖f‖₁`.
fn check_membership(space: &ModelSpace, f: &[C64]) -> Result<()> {
    let n = space.grid_size();
    if f.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} samples, got {}", f.len())));
    }
    if f.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidArgument("f has non-finite samples".into()));
    }
    let l1 = ModelSpace::l1_norm(f);
    if l1 == 0.0 {
        return Ok(());
    }
    let tail = dft::negative_tail(f);
    let mirrored: Vec<C64> = f
        .iter()
        .zip(space.nodes().iter().zip(space.theta_samples()))
        .map(|(v, (t, th))| {
            let s = t.conj() * th;
            s * s * v.conj()
        })
        .collect();
    let tail = tail.max(dft::negative_tail(&mirrored));
    if tail > 1e-8 * l1 {
        return Err(Error::InvalidArgument(format!(
            "f is not in K¹ of θ²/z: DFT tail {tail:.3e} exceeds 1e-8·‖f‖₁"
        )));
    }
    Ok(())
}

fn relative_residual(f: &[C64], g: &[C64], l1: f64) -> f64 {
    if l1 == 0.0 {
        return ModelSpace::l1_norm(g);
    }
    let d: Vec<C64> = f.iter().zip(g).map(|(a, b)| a - b).collect();
    ModelSpace::l1_norm(&d) / l1
}

fn factorize_centered(space: &ModelSpace, f: &[C64], opts: &FactorOptions) -> Result<FactorizationResult> {
    let f_l1 = ModelSpace::l1_norm(f);
    let mut timings = opts.timings.then(Vec::new);
    let mut clock = Instant::now();
    let mut lap = |stage: &str, timings: &mut Option<Vec<StageTiming>>| {
        if let Some(t) = timings.as_mut() {
            t.push(StageTiming {
                stage: stage.into(),
                seconds: clock.elapsed().as_secs_f64(),
            });
        }
        clock = Instant::now();
    };
    if f_l1 == 0.0 {
        return Ok(FactorizationResult {
            theta_id: space.theta_id().to_string(),
            pairs: Vec::new(),
            constant: 0.0,
            residual_rel: 0.0,
            f_l1,
            pieces: Vec::new(),
            c_rep: None,
            stage_timings: timings,
        });
    }

    // h = zθ̄f is an element of X; split it into at most four nonnegative pieces.
    let h: Vec<C64> = f
        .iter()
        .zip(space.nodes().iter().zip(space.theta_samples()))
        .map(|(v, (t, th))| t * th.conj() * v)
        .collect();
    let hmax = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut pieces: Vec<(C64, Vec<f64>)> = Vec::new();
    let mut c_rep: Option<f64> = None;
    for (unit, part) in [
        (C64::new(1.0, 0.0), h.iter().map(|v| v.re).collect::<Vec<f64>>()),
        (C64::new(0.0, 1.0), h.iter().map(|v| v.im).collect::<Vec<f64>>()),
    ] {
        let scale = part.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if scale <= 1e-15 * hmax {
            continue;
        }
        let lo = part.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = part.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo >= -1e-13 * scale {
            pieces.push((unit, part.iter().map(|v| v.max(0.0)).collect()));
        } else if hi <= 1e-13 * scale {
            pieces.push((-unit, part.iter().map(|v| (-v).max(0.0)).collect()));
        } else {
            let maj = majorant_clark(space, &part, None).map_err(|e| e.in_stage("majorant"))?;
            c_rep = Some(c_rep.map_or(maj.c_rep, |c: f64| c.max(maj.c_rep)));
            let plus = maj.g.iter().zip(&part).map(|(g, u)| 0.5 * (g + u)).collect();
            let minus = maj.g.iter().zip(&part).map(|(g, u)| 0.5 * (g - u)).collect();
            pieces.push((unit, plus));
            pieces.push((-unit, minus));
        }
    }
    lap("split", &mut timings);

    let mut roots = Vec::with_capacity(pieces.len());
    for (zeta, p) in &pieces {
        let root = dyakonov_root(space, p).map_err(|e| e.in_stage("root"))?;
        roots.push((*zeta, p.iter().sum::<f64>() / p.len() as f64, root));
    }
    lap("root", &mut timings);

    // P = |q|² gives z̄θP = q · z̄θq̄, so each piece contributes (ζq, q̃).
    let mut pairs = Vec::with_capacity(roots.len());
    let mut report = Vec::with_capacity(roots.len());
    for (zeta, l1, root) in roots {
        let y = space.involution(&root.g).map_err(|e| e.in_stage("involution"))?;
        pairs.push(FactorPair {
            x: root.g.scaled(zeta),
            y,
        });
        report.push(Piece {
            zeta,
            l1,
            modulus_residual: root.modulus_residual,
            membership_residual: root.membership_residual,
        });
    }
    lap("involution", &mut timings);

    let mut out = FactorizationResult {
        theta_id: space.theta_id().to_string(),
        constant: pairs.iter().map(|p| p.x.norm() * p.y.norm()).sum(),
        pairs,
        residual_rel: 0.0,
        f_l1,
        pieces: report,
        c_rep,
        stage_timings: None,
    };
    out.residual_rel = relative_residual(f, &out.reassemble(space), f_l1);
    lap("assemble", &mut timings);
    out.stage_timings = timings;
    if out.residual_rel > RESIDUAL_LIMIT {
        return Err(Error::tolerance("factorization residual", out.residual_rel, RESIDUAL_LIMIT).in_stage("assemble"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerFunction;

    #[test]
    fn zero_input_gives_empty_result() {
        let m = ModelSpace::new(InnerFunction::monomial(3), 256).unwrap();
        let r = factorize4(&m, &[C64::new(0.0, 0.0); 256]).unwrap();
        assert!(r.pairs.is_empty());
        assert_eq!(r.constant, 0.0);
    }

    #[test]
    fn polynomial_input() {
        let m = ModelSpace::new(InnerFunction::monomial(4), 512).unwrap();
        // Degree ≤ 6 = 2·3.
        let f: Vec<C64> = m
            .nodes()
            .iter()
            .map(|t| C64::new(1.0, 0.5) + t * 2.0 - t.powi(3) * C64::new(0.0, 0.7) + t.powi(6) * 0.3)
            .collect();
        let r = factorize4(&m, &f).unwrap();
        assert!(r.pairs.len() <= 4);
        assert!(r.residual_rel <= 1e-6, "{}", r.residual_rel);
        assert!(r.constant >= r.f_l1 * (1.0 - 1e-6));
    }

    #[test]
    fn stage_is_named_on_bad_input() {
        let m = ModelSpace::new(InnerFunction::monomial(2), 256).unwrap();
        let f: Vec<C64> = m.nodes().iter().map(|t| t.powi(5)).collect();
        match factorize4(&m, &f) {
            Err(Error::Stage { stage, .. }) => assert_eq!(stage, "membership"),
            other => panic!("unexpected {other:?}"),
        }
    }
}
