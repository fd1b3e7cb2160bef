//! Clark measures of finite Blaschke products.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::InnerFunction;
use crate::measure::{Atom, BoundaryMeasure};
use crate::modelspace::ModelSpace;
use crate::{cplx, CMatrix, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClarkAtom {
    pub angle: f64,
    pub weight: f64,
}

impl ClarkAtom {
    pub fn point(&self) -> C64 {
        C64::from_polar(1.0, self.angle)
    }
}

/// The Clark measure `σ_α`: atoms where θ = α, with weights `1/|θ'|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClarkData {
    #[serde(with = "cplx::pair")]
    pub alpha: C64,
    pub atoms: Vec<ClarkAtom>,
}

impl ClarkData {
    pub fn to_measure(&self) -> BoundaryMeasure {
        BoundaryMeasure::from_atoms(
            self.atoms
                .iter()
                .map(|a| Atom {
                    angle: a.angle,
                    radius: 1.0,
                    weight: C64::new(a.weight, 0.0),
                })
                .collect(),
        )
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// `Re((α + θ(0))/(α − θ(0)))`, the total mass of `σ_α`.
pub fn herglotz_mass(theta: &InnerFunction, alpha: C64) -> f64 {
    let t0 = theta.value(C64::new(0.0, 0.0));
    ((alpha + t0) / (alpha - t0)).re
}

pub fn clark_measure(theta: &InnerFunction, alpha: C64) -> Result<ClarkData> {
    if (alpha.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "Clark parameter must be unimodular, |α| = {}",
            alpha.norm()
        )));
    }
    let n = theta.degree();
    let psi = theta.arg_branch()?;
    let beta = (alpha / theta.front()).arg();
    let p0 = psi.psi(0.0);
    // Targets β + 2πk inside [ψ(0), ψ(0) + 2πn).
    let mut k0 = ((p0 - beta) / TAU).ceil();
    if beta + TAU * (k0 - 1.0) >= p0 {
        k0 -= 1.0;
    }
    let mut atoms = Vec::with_capacity(n);
    for j in 0..n {
        let target = beta + TAU * (k0 + j as f64);
        let x = psi.solve(target.min(p0 + TAU * n as f64))?;
        let t = C64::from_polar(1.0, x);
        let miss = (theta.value(t) - alpha).norm();
        if miss > 1e-10 {
            return Err(Error::tolerance("clark atom |θ(t) − α|", miss, 1e-10));
        }
        atoms.push(ClarkAtom {
            angle: x,
            weight: 1.0 / theta.boundary_deriv_mod(t),
        });
    }
    let data = ClarkData { alpha, atoms };
    let want = herglotz_mass(theta, alpha);
    let dev = (data.total_weight() - want).abs();
    let limit = 1e-9 * want.abs().max(1.0);
    if dev > limit {
        return Err(Error::tolerance("clark herglotz mass", dev, limit));
    }
    Ok(data)
}

/// Max over basis pairs of `|Σ_j w_j b_k(t_j) conj(b_l(t_j)) − δ_kl|`.
pub fn clark_isometry_check(space: &ModelSpace, clark: &ClarkData) -> f64 {
    let n = space.degree();
    let mut gram = CMatrix::zeros(n, n);
    for atom in &clark.atoms {
        let b = space.basis_at(atom.point());
        gram += &b.conjugate() * b.transpose() * C64::new(atom.weight, 0.0);
    }
    crate::linalg::max_abs(&(gram - CMatrix::identity(n, n)))
}

/// A point of `supp σ₁ ∪ supp σ₋₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionPoint {
    pub angle: f64,
    /// `+1` for atoms of `σ₁`, `−1` for atoms of `σ₋₁`.
    pub alpha: i8,
    /// `|θ'(t)|` at the point.
    pub deriv: f64,
}

/// The merged Clark support cut into closed arcs `[t_n, t_{n+1}]` (cyclic).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClarkPartition {
    pub points: Vec<PartitionPoint>,
    /// Half the argument increase of θ across each arc; π/2 by construction.
    pub half_arg_gaps: Vec<f64>,
    /// Max over arcs of `max|θ'|/min|θ'|` sampled at 32 points per arc.
    pub a_emp: f64,
}

impl ClarkPartition {
    /// Arc `n` as `(start, end)` angles, with `end > start` (may exceed 2π).
    pub fn arc(&self, n: usize) -> (f64, f64) {
        let m = self.points.len();
        let start = self.points[n].angle;
        let end = if n + 1 < m {
            self.points[n + 1].angle
        } else {
            self.points[0].angle + TAU
        };
        (start, end)
    }

    pub fn max_gap_error(&self) -> f64 {
        self.half_arg_gaps
            .iter()
            .map(|g| (g - PI / 2.0).abs())
            .fold(0.0, f64::max)
    }
}

pub const ARC_SAMPLES: usize = 32;

pub fn clark_union_partition(theta: &InnerFunction) -> Result<ClarkPartition> {
    let psi = theta.arg_branch()?;
    let plus = clark_measure(theta, C64::new(1.0, 0.0))?;
    let minus = clark_measure(theta, C64::new(-1.0, 0.0))?;
    let mut points: Vec<PartitionPoint> = plus
        .atoms
        .iter()
        .map(|a| (a, 1i8))
        .chain(minus.atoms.iter().map(|a| (a, -1i8)))
        .map(|(a, s)| PartitionPoint {
            angle: a.angle,
            alpha: s,
            deriv: 1.0 / a.weight,
        })
        .collect();
    points.sort_by(|a, b| a.angle.total_cmp(&b.angle));

    let m = points.len();
    let mut half_arg_gaps = Vec::with_capacity(m);
    let mut a_emp: f64 = 1.0;
    for n in 0..m {
        let start = points[n].angle;
        let end = if n + 1 < m {
            points[n + 1].angle
        } else {
            points[0].angle + TAU
        };
        let (ps, pe) = if n + 1 < m {
            (psi.psi(start), psi.psi(end))
        } else {
            (psi.psi(start), psi.psi(points[0].angle) + TAU * theta.degree() as f64)
        };
        half_arg_gaps.push(0.5 * (pe - ps));
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..ARC_SAMPLES {
            let x = start + (end - start) * i as f64 / (ARC_SAMPLES - 1) as f64;
            let d = psi.derivative(x);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        a_emp = a_emp.max(hi / lo);
    }
    Ok(ClarkPartition {
        points,
        half_arg_gaps,
        a_emp,
    })
}
