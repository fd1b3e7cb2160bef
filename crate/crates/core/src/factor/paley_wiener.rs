//! The line analogue: functions of `PW¹_π` given by cardinal series, Fejér
//! majorants, and the four-term factorization into pairs from `PW²_{π/2}`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::{dft, linalg, CMatrix, CVector, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PwKernel {
    /// `sinc(t) = sin(πt)/(πt)`.
    Cardinal,
    /// `sin²(πt/2)/t²`, with value `π²/4` at 0.
    Fejer,
    /// `sinc(t/2)`, with nodes at the even integers: the cardinal series of `PW²_{π/2}`.
    HalfBand,
}

impl PwKernel {
    /// Distance between consecutive nodes.
    pub fn spacing(self) -> f64 {
        match self {
            PwKernel::HalfBand => 2.0,
            _ => 1.0,
        }
    }

    fn eval(self, s: f64) -> f64 {
        match self {
            PwKernel::HalfBand => PwKernel::Cardinal.eval(0.5 * s),
            PwKernel::Cardinal => {
                if s.abs() < 1e-12 {
                    1.0
                } else {
                    (PI * s).sin() / (PI * s)
                }
            }
            PwKernel::Fejer => {
                if s.abs() < 1e-6 {
                    PI * PI / 4.0 * (1.0 - PI * PI * s * s / 12.0)
                } else {
                    let v = (0.5 * PI * s).sin();
                    v * v / (s * s)
                }
            }
        }
    }
}

/// `f(t) = Σ_j c_j K(t − (first + j))`, of exponential type `π`.
#[derive(Clone, Debug, Serialize)]
pub struct PwFunction {
    pub kernel: PwKernel,
    pub first: i64,
    pub coefs: Vec<C64>,
    /// Share of `Σ|f(j)|²` lost by truncating to the window.
    pub tail_energy: f64,
}

/// Tail-energy limit for [`PwFunction::sample`].
pub const TAIL_LIMIT: f64 = 1e-8;

impl PwFunction {
    /// Cardinal series from samples at the integers `−window..=window`.
    pub fn cardinal(window: usize, samples: Vec<C64>) -> Result<Self> {
        if samples.len() != 2 * window + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples for window {window}",
                2 * window + 1
            )));
        }
        Ok(PwFunction {
            kernel: PwKernel::Cardinal,
            first: -(window as i64),
            coefs: samples,
            tail_energy: 0.0,
        })
    }

    /// Samples `f` at the integers of the window and measures the energy left
    /// outside it, up to 64 windows out.
    pub fn sample(window: usize, f: impl Fn(f64) -> C64) -> Result<Self> {
        let w = window as i64;
        let coefs: Vec<C64> = (-w..=w).map(|j| f(j as f64)).collect();
        let inside: f64 = coefs.iter().map(|c| c.norm_sqr()).sum();
        let outside: f64 = (w + 1..=64 * w.max(1))
            .map(|j| f(j as f64).norm_sqr() + f(-j as f64).norm_sqr())
            .sum();
        let total = inside + outside;
        let tail_energy = if total > 0.0 { outside / total } else { 0.0 };
        if tail_energy > TAIL_LIMIT {
            return Err(Error::tolerance("cardinal tail energy", tail_energy, TAIL_LIMIT));
        }
        Ok(PwFunction {
            kernel: PwKernel::Cardinal,
            first: -w,
            coefs,
            tail_energy,
        })
    }

    /// Half-width of the window of integer nodes.
    pub fn window(&self) -> usize {
        let last = self.first + self.coefs.len() as i64 - 1;
        self.first.unsigned_abs().max(last.unsigned_abs()) as usize
    }

    pub fn eval(&self, t: f64) -> C64 {
        // Every kernel is a fixed trigonometric factor of t times (−1)^j over
        // a power of the distance to the node, so the trig part is shared.
        let (trig, power) = match self.kernel {
            PwKernel::Cardinal => ((PI * t).sin() / PI, 1),
            PwKernel::Fejer => (0.0, 2),
            PwKernel::HalfBand => (2.0 * (0.5 * PI * t).sin() / PI, 1),
        };
        let cos = (PI * t).cos();
        let mut acc = C64::new(0.0, 0.0);
        for (j, c) in self.coefs.iter().enumerate() {
            let s = t - self.node(j);
            if s.abs() < 1e-6 {
                acc += c * self.kernel.eval(s);
                continue;
            }
            let sign = if (self.first + j as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let v = if power == 2 {
                0.5 * (1.0 - sign * cos) / (s * s)
            } else {
                sign * trig / s
            };
            acc += c * v;
        }
        acc
    }

    /// Position of node `j`.
    pub fn node(&self, j: usize) -> f64 {
        (self.first + j as i64) as f64 * self.kernel.spacing()
    }

    pub fn is_zero(&self) -> bool {
        self.coefs.iter().all(|c| c.norm() == 0.0)
    }

    fn part(&self, pick: impl Fn(C64) -> f64) -> PwFunction {
        PwFunction {
            kernel: self.kernel,
            first: self.first,
            coefs: self.coefs.iter().map(|&c| C64::new(pick(c), 0.0)).collect(),
            tail_energy: self.tail_energy,
        }
    }
}

/// Uniform grid `t_k = −L + 2Lk/P` on `[−L, L)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LineGrid {
    pub half_width: f64,
    pub points: usize,
}

impl LineGrid {
    pub const POINTS: usize = 1 << 16;

    pub fn for_window(window: usize) -> Self {
        LineGrid {
            half_width: 4.0 * window as f64,
            points: Self::POINTS,
        }
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|k| -self.half_width + k as f64 * self.step()).collect()
    }

    /// Riemann sum of `|v|` over the grid.
    pub fn l1(&self, v: &[C64]) -> f64 {
        v.iter().map(|z| z.norm()).sum::<f64>() * self.step()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PwMajorant {
    /// Fejér series `Σ c_n sin²(π(t−n)/2)/(t−n)²` over `n ∈ [−L, L)`.
    pub g: PwFunction,
    /// `‖g‖_{L¹(ℝ)}/‖f‖_{L¹}`.
    pub c_rep: f64,
    /// `min (g − |f|)` over the check points, relative to `max|f|`.
    pub margin: f64,
}

const ARC_SAMPLES: usize = 32;
const CHECK_SAMPLES: usize = 16;

/// Majorant `g ≥ |f|` for real `f`, with `c_n = max_{[n, n+1]} |f|`.
pub fn pw_majorant(f: &PwFunction) -> Result<PwMajorant> {
    if f.kernel != PwKernel::Cardinal {
        return Err(Error::InvalidArgument("majorants are built from cardinal series".into()));
    }
    let scale = f.coefs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if f.coefs.iter().any(|c| c.im.abs() > 1e-12 * scale) {
        return Err(Error::InvalidArgument("pw_majorant needs a real function".into()));
    }
    let window = f.window();
    let grid = LineGrid::for_window(window);
    let l = grid.half_width as i64;
    let coefs: Vec<C64> = (-l..l)
        .map(|n| {
            let c = (0..=ARC_SAMPLES)
                .map(|k| f.eval(n as f64 + k as f64 / ARC_SAMPLES as f64).norm())
                .fold(0.0, f64::max);
            C64::new(c, 0.0)
        })
        .collect();
    let g = PwFunction {
        kernel: PwKernel::Fejer,
        first: -l,
        coefs,
        tail_energy: 0.0,
    };
    if f.is_zero() {
        return Ok(PwMajorant {
            g,
            c_rep: 0.0,
            margin: 0.0,
        });
    }
    let w = window as i64;
    let mut margin = f64::INFINITY;
    let mut fmax: f64 = 0.0;
    for n in -w..w {
        for k in 0..=CHECK_SAMPLES {
            let t = if k == CHECK_SAMPLES {
                n as f64
            } else {
                n as f64 + (k as f64 + 0.5) / CHECK_SAMPLES as f64
            };
            let fv = f.eval(t).norm();
            fmax = fmax.max(fv);
            margin = margin.min(g.eval(t).re - fv);
        }
    }
    let margin = margin / fmax;
    if margin < -1e-12 {
        return Err(Error::tolerance("line majorant deficit", -margin, 1e-12));
    }
    let f_l1 = grid.l1(&grid.nodes().iter().map(|&t| f.eval(t)).collect::<Vec<_>>());
    let g_l1: f64 = g.coefs.iter().map(|c| c.re).sum::<f64>() * PI * PI / 2.0;
    Ok(PwMajorant {
        g,
        c_rep: g_l1 / f_l1,
        margin,
    })
}

/// `x = ζ q`, `y = conj(q)` with `q ∈ PW²_{π/2}`.
#[derive(Clone, Debug, Serialize)]
pub struct PwPair {
    #[serde(with = "crate::cplx::pair")]
    pub zeta: C64,
    /// Half-band cardinal series of `q`.
    pub q: PwFunction,
    /// `‖q‖₂² = 2Σ|a_m|²`.
    pub energy: f64,
    /// Share of the energy of the transform-based root outside `[−π/2, π/2]`.
    pub band_defect: f64,
    /// `max_j ||q(j)|² − P(j)|/max P` over the fitted integers.
    pub node_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PwFactorization {
    pub grid: LineGrid,
    pub pairs: Vec<PwPair>,
    /// `Σ‖x_k‖₂‖y_k‖₂/‖f‖₁`.
    pub constant_ratio: f64,
    /// `‖f − Σ x_k y_k‖_{L¹[−N, N]}/‖f‖_{L¹[−N, N]}`.
    pub residual: f64,
    /// Largest `C_rep` among the majorants used.
    pub c_rep: Option<f64>,
}

pub const PW_RESIDUAL_LIMIT: f64 = 1e-4;
const SIGN_SLACK: f64 = 1e-6;

pub fn pw_factorize(f: &PwFunction) -> Result<PwFactorization> {
    if f.kernel != PwKernel::Cardinal {
        return Err(Error::InvalidArgument("pw_factorize expects a cardinal series".into()));
    }
    let window = f.window();
    let grid = LineGrid::for_window(window);
    if window == 0 || LineGrid::POINTS % (8 * window) != 0 {
        return Err(Error::InvalidArgument(format!(
            "window {window} must divide {} so integers fall on the line grid",
            LineGrid::POINTS / 8
        )));
    }
    if f.is_zero() {
        return Ok(PwFactorization {
            grid,
            pairs: Vec::new(),
            constant_ratio: 0.0,
            residual: 0.0,
            c_rep: None,
        });
    }
    let nodes = grid.nodes();
    let scale = f.coefs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut pieces: Vec<(C64, Vec<f64>)> = Vec::new();
    let mut c_rep: Option<f64> = None;
    for (unit, part) in [
        (C64::new(1.0, 0.0), f.part(|c| c.re)),
        (C64::new(0.0, 1.0), f.part(|c| c.im)),
    ] {
        if part.coefs.iter().all(|c| c.norm() <= 1e-15 * scale) {
            continue;
        }
        let values: Vec<f64> = nodes.iter().map(|&t| part.eval(t).re).collect();
        // The sign test looks at the window only: outside it the truncated
        // series carries truncation ripple rather than the function.
        let inside = nodes.iter().zip(&values).filter(|(t, _)| t.abs() <= window as f64).map(|(_, v)| *v);
        let top = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let lo = inside.clone().fold(f64::INFINITY, f64::min);
        let hi = inside.fold(f64::NEG_INFINITY, f64::max);
        // Dips below SIGN_SLACK·max are truncation ripple of the cardinal series.
        if lo >= -SIGN_SLACK * top {
            pieces.push((unit, values.iter().map(|v| v.max(0.0)).collect()));
        } else if hi <= SIGN_SLACK * top {
            pieces.push((-unit, values.iter().map(|v| (-v).max(0.0)).collect()));
        } else {
            let maj = pw_majorant(&part).map_err(|e| e.in_stage("majorant"))?;
            c_rep = Some(c_rep.map_or(maj.c_rep, |c: f64| c.max(maj.c_rep)));
            let g: Vec<f64> = nodes.iter().map(|&t| maj.g.eval(t).re).collect();
            pieces.push((unit, g.iter().zip(&values).map(|(g, u)| 0.5 * (g + u)).collect()));
            pieces.push((-unit, g.iter().zip(&values).map(|(g, u)| 0.5 * (g - u)).collect()));
        }
    }

    let mut pairs = Vec::with_capacity(pieces.len());
    for (zeta, p) in &pieces {
        let (raw, band_defect) = line_outer_root(&grid, &nodes, p).map_err(|e| e.in_stage("root"))?;
        let (q, node_residual) = polish_half_band(&grid, &raw, p);
        let energy = 2.0 * q.coefs.iter().map(|v| v.norm_sqr()).sum::<f64>();
        pairs.push(PwPair {
            zeta: *zeta,
            q,
            energy,
            band_defect,
            node_residual,
        });
    }

    let w = window as f64;
    let mut diff = 0.0;
    let mut mass = 0.0;
    let mut total_l1 = 0.0;
    for &t in &nodes {
        let fv = f.eval(t);
        total_l1 += fv.norm();
        if t.abs() <= w {
            let s: C64 = pairs.iter().map(|p| p.zeta * p.q.eval(t).norm_sqr()).sum();
            diff += (fv - s).norm();
            mass += fv.norm();
        }
    }
    let residual = diff / mass;
    let constant: f64 = pairs.iter().map(|p| p.energy).sum();
    let out = PwFactorization {
        grid,
        constant_ratio: constant / (total_l1 * grid.step()),
        pairs,
        residual,
        c_rep,
    };
    if residual > PW_RESIDUAL_LIMIT {
        return Err(Error::tolerance("line factorization residual", residual, PW_RESIDUAL_LIMIT).in_stage("assemble"));
    }
    Ok(out)
}

/// `q ∈ PW²_{π/2}` with `|q|² ≈ p` on the grid: the outer function of the upper
/// half-plane with modulus `√p`, shifted down by `π/2` in frequency and band-limited.
fn line_outer_root(grid: &LineGrid, nodes: &[f64], p: &[f64]) -> Result<(Vec<C64>, f64)> {
    let max = p.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0) {
        return Err(Error::InvalidArgument("nonnegative piece vanishes".into()));
    }
    let floor = 1e-14 * max;
    // Divide out the decay with the explicit outer factor (t + i)^{-k}.
    let k = decay_order(grid, nodes, p, floor);
    let len = p.len();
    let logs: Vec<C64> = p
        .iter()
        .zip(nodes)
        .map(|(v, t)| C64::new(v.max(floor).ln() + k as f64 * (1.0 + t * t).ln(), 0.0))
        .collect();
    let mut c = dft::coefficients(&logs);
    c[0] *= 0.5;
    for v in c[len / 2..].iter_mut() {
        *v = C64::new(0.0, 0.0);
    }
    let half = dft::synthesize(&c);
    let i = C64::new(0.0, 1.0);
    let raw: Vec<C64> = half
        .iter()
        .zip(nodes)
        .map(|(h, &t)| h.exp() / (C64::new(t, 1.0)).powi(k as i32) * (-i * 0.5 * PI * t).exp())
        .collect();
    // Keep |ω| ≤ π/2; grid frequencies are ω_m = πm/L.
    let mut spec = dft::coefficients(&raw);
    let total: f64 = spec.iter().map(|v| v.norm_sqr()).sum();
    let edge = (grid.half_width / 2.0).round() as i64;
    let mut removed = 0.0;
    for (idx, v) in spec.iter_mut().enumerate() {
        if dft::frequency(idx, len).abs() > edge {
            removed += v.norm_sqr();
            *v = C64::new(0.0, 0.0);
        }
    }
    Ok((dft::synthesize(&spec), removed / total))
}

/// Half-band cardinal series `q = Σ a_m sinc((t − 2m)/2)`, `2m ∈ [−L, L)`,
/// started from the samples of `raw` and refined by Gauss–Newton so that
/// `|q(j)|² = p(j)` at the integers `|j| ≤ 3L/4`. Both sides have type `π`,
/// so agreement at the integers pins them down; the outer nodes stay free to
/// absorb the slowly decaying tails that the truncated series cannot carry.
fn polish_half_band(grid: &LineGrid, raw: &[C64], p: &[f64]) -> (PwFunction, f64) {
    let l = grid.half_width as i64;
    let per_unit = (1.0 / grid.step()).round() as usize;
    let fit = 3 * l / 4;
    let targets: Vec<f64> = (-fit..=fit).map(|j| p[(j + l) as usize * per_unit]).collect();
    let first = -l / 2;
    let count = l as usize;
    let mut q = PwFunction {
        kernel: PwKernel::HalfBand,
        first,
        coefs: (0..count).map(|m| raw[2 * m * per_unit]).collect(),
        tail_energy: 0.0,
    };
    // sinc((j − 2m)/2) for the fitted integers j.
    let design = CMatrix::from_fn(targets.len(), count, |j, m| {
        C64::new(PwKernel::HalfBand.eval((j as i64 - fit) as f64 - q.node(m)), 0.0)
    });
    let (coefs, _) = linalg::fit_modulus(&design, &targets, &q.coefs, 100);
    q.coefs = coefs;
    let pmax = targets.iter().copied().fold(0.0, f64::max);
    let values = &design * CVector::from_column_slice(&q.coefs);
    let node_residual = values
        .iter()
        .zip(&targets)
        .map(|(x, t)| (x.norm_sqr() - t).abs())
        .fold(0.0, f64::max)
        / pmax;
    (q, node_residual)
}
/// Power `k` of `(1 + t²)` that best flattens `log p` on the outer half of the grid.
fn decay_order(grid: &LineGrid, nodes: &[f64], p: &[f64], floor: f64) -> u32 {
    let lo = grid.half_width / 4.0;
    let (mut sx, mut sy, mut sxx, mut sxy, mut m) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (v, t) in p.iter().zip(nodes) {
        if t.abs() >= lo {
            let x = (1.0 + t * t).ln();
            let y = v.max(floor).ln();
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            m += 1.0;
        }
    }
    let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    (-slope).round().clamp(0.0, 4.0) as u32
}
