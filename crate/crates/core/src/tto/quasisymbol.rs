//! Nonnegative quasisymbols of positive semidefinite TTOs.
//!
//! The first attempt is nonnegative least squares on a fixed support: the
//! atoms of `σ₁ ∪ σ₋₁` plus a uniform density. That cone is polyhedral and
//! misses most operators, so the fallback is exact: with `λ` the smallest
//! eigenvalue, `A − λI` is a singular nonnegative TTO, any nonnegative
//! quasisymbol of it lives on the boundary zeros of a kernel vector, and the
//! weights on those zeros solve a small linear system. The result is
//! `λ·m + Σ w_j δ_{t_j}`.

use nalgebra::{DMatrix, DVector};

use super::{measure_matrix, sarason_test, Crofoot, TtOperator};
use crate::clark::clark_measure;
use crate::error::{Error, Result};
use crate::measure::{Atom, BoundaryMeasure};
use crate::modelspace::ModelSpace;
use crate::{dft, linalg, poly, CMatrix, C64};

pub const RESIDUAL_LIMIT: f64 = 1e-7;
/// Roots within this distance of the circle count as boundary zeros.
const ON_CIRCLE: f64 = 1e-6;

/// Which support produced the measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// Atoms of `σ₁ ∪ σ₋₁` plus a uniform density.
    ClarkPair,
    /// Uniform density plus atoms at boundary zeros of a kernel vector.
    KernelZeros,
}

#[derive(Clone, Debug)]
pub struct QuasisymbolFit {
    pub measure: BoundaryMeasure,
    /// `‖A_μ − A‖_F / ‖A‖_F`.
    pub residual: f64,
    pub support: Support,
    /// Residual of the Clark-pair attempt, always recorded.
    pub clark_pair_residual: f64,
}

/// A nonnegative measure `μ` with `A_μ = A`, for Hermitian `A ≥ 0` in `𝒯(θ)`.
pub fn nonneg_quasisymbol(space: &ModelSpace, a: &TtOperator) -> Result<BoundaryMeasure> {
    Ok(fit_nonneg_quasisymbol(space, a, true)?.measure)
}

/// As [`nonneg_quasisymbol`], reporting the fit. With `fallback = false` only
/// the Clark-pair support is tried.
pub fn fit_nonneg_quasisymbol(space: &ModelSpace, a: &TtOperator, fallback: bool) -> Result<QuasisymbolFit> {
    let norm = a.norm();
    let herm = linalg::max_abs(&(&a.matrix - a.matrix.adjoint()));
    if herm > 1e-9 * norm.max(1e-300) {
        return Err(Error::InvalidArgument(format!(
            "operator is not Hermitian (deviation {herm:.3e})"
        )));
    }
    let min_eig = min_eigenvalue(&a.matrix);
    if min_eig < -1e-9 * norm {
        return Err(Error::InvalidArgument(format!(
            "operator is not positive semidefinite (eigenvalue {min_eig:.3e})"
        )));
    }
    let sar = sarason_test(space, a)?;
    if sar > 1e-8 {
        return Err(Error::tolerance("sarason residual of input", sar, 1e-8));
    }
    if norm == 0.0 {
        return Ok(QuasisymbolFit {
            measure: BoundaryMeasure::default(),
            residual: 0.0,
            support: Support::ClarkPair,
            clark_pair_residual: 0.0,
        });
    }

    let w = space.theta().value(C64::new(0.0, 0.0));
    if w.norm() > 1e-14 {
        // Solve for U A U* on K_Θ, Θ(0) = 0, and pull the measure back.
        let cf = Crofoot::new(space, w)?;
        let b = cf.forward(a);
        let inner = fit_centered(&cf.target, &b.matrix, fallback)?;
        let measure = cf.pull_back_measure(space, &inner.measure);
        let residual = relative_residual(space, &measure, &a.matrix);
        if residual > RESIDUAL_LIMIT {
            return Err(Error::tolerance("quasisymbol moment residual", residual, RESIDUAL_LIMIT));
        }
        return Ok(QuasisymbolFit {
            measure,
            residual,
            ..inner
        });
    }
    fit_centered(space, &a.matrix, fallback)
}

fn min_eigenvalue(a: &CMatrix) -> f64 {
    a.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn fit_centered(space: &ModelSpace, a: &CMatrix, fallback: bool) -> Result<QuasisymbolFit> {
    let measure = fit_clark_pair(space, a)?;
    let clark_pair_residual = relative_residual(space, &measure, a);
    if clark_pair_residual <= RESIDUAL_LIMIT {
        return Ok(QuasisymbolFit {
            measure,
            residual: clark_pair_residual,
            support: Support::ClarkPair,
            clark_pair_residual,
        });
    }
    if !fallback {
        return Err(Error::tolerance(
            "quasisymbol moment residual on the Clark-pair support",
            clark_pair_residual,
            RESIDUAL_LIMIT,
        ));
    }
    let measure = fit_kernel_zeros(space, a)?;
    let residual = relative_residual(space, &measure, a);
    if residual > RESIDUAL_LIMIT {
        return Err(Error::tolerance("quasisymbol moment residual", residual, RESIDUAL_LIMIT));
    }
    Ok(QuasisymbolFit {
        measure,
        residual,
        support: Support::KernelZeros,
        clark_pair_residual,
    })
}

fn relative_residual(space: &ModelSpace, mu: &BoundaryMeasure, a: &CMatrix) -> f64 {
    (measure_matrix(space, mu) - a).norm() / a.norm()
}

/// NNLS over Hermitian rank-one kernels at the given angles, plus the
/// identity (uniform density) when `with_density`.
fn nnls_on_atoms(space: &ModelSpace, a: &CMatrix, angles: &[f64], with_density: bool) -> BoundaryMeasure {
    let n = space.degree();
    let cols = angles.len() + usize::from(with_density);
    let mut sys = DMatrix::<f64>::zeros(2 * n * n, cols);
    let mut put = |col: usize, m: &CMatrix| {
        for (r, v) in m.iter().enumerate() {
            sys[(2 * r, col)] = v.re;
            sys[(2 * r + 1, col)] = v.im;
        }
    };
    for (col, &x) in angles.iter().enumerate() {
        let b = space.basis_at(C64::from_polar(1.0, x));
        put(col, &(b.conjugate() * b.transpose()));
    }
    if with_density {
        put(angles.len(), &CMatrix::identity(n, n));
    }
    let mut rhs = DVector::<f64>::zeros(2 * n * n);
    for (r, v) in a.iter().enumerate() {
        rhs[2 * r] = v.re;
        rhs[2 * r + 1] = v.im;
    }
    let (x, _) = linalg::nnls(&sys, &rhs);
    let atoms = angles
        .iter()
        .zip(x.iter())
        .filter(|(_, &c)| c > 0.0)
        .map(|(&angle, &c)| Atom {
            angle,
            radius: 1.0,
            weight: C64::new(c, 0.0),
        })
        .collect();
    let density = if with_density && x[angles.len()] > 0.0 {
        Some(vec![C64::new(x[angles.len()], 0.0); space.grid_size()])
    } else {
        None
    };
    BoundaryMeasure { atoms, density }
}

fn fit_clark_pair(space: &ModelSpace, a: &CMatrix) -> Result<BoundaryMeasure> {
    let mut angles = Vec::new();
    for alpha in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
        angles.extend(clark_measure(space.theta(), alpha)?.atoms.iter().map(|x| x.angle));
    }
    Ok(nnls_on_atoms(space, a, &angles, true))
}

fn fit_kernel_zeros(space: &ModelSpace, a: &CMatrix) -> Result<BoundaryMeasure> {
    let n = space.degree();
    let eig = a.clone().symmetric_eigen();
    let (k, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("degree ≥ 1");
    let lambda = lambda.max(0.0);
    let rest = a - CMatrix::identity(n, n) * C64::new(lambda, 0.0);
    let g = space.kfun(eig.eigenvectors.column(k).iter().copied().collect());
    let angles = boundary_zeros(space, &g)?;
    let mut measure = nnls_on_atoms(space, &rest, &angles, false);
    if lambda > 0.0 {
        measure.density = Some(vec![C64::new(lambda, 0.0); space.grid_size()]);
    }
    Ok(measure)
}

/// Angles of the zeros of `g ∈ K_θ` on the circle. `g = p/Π(1 − ā_k z)` with
/// `p` a polynomial of degree below `n`, recovered exactly by the DFT.
fn boundary_zeros(space: &ModelSpace, g: &crate::modelspace::KFun) -> Result<Vec<f64>> {
    let nodes = space.nodes();
    let zeros = space.theta().zeros();
    let samples: Vec<C64> = space
        .samples(g)
        .iter()
        .zip(nodes)
        .map(|(v, &t)| {
            zeros
                .iter()
                .fold(*v, |acc, &a| acc * (C64::new(1.0, 0.0) - a.conj() * t))
        })
        .collect();
    let coefs = dft::coefficients(&samples);
    let big = coefs[..space.degree()].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let p: Vec<C64> = coefs[..space.degree()].iter().map(|c| c / big).collect();
    let Some(deg) = p.iter().rposition(|c| c.norm() > 1e-12) else {
        return Ok(Vec::new());
    };
    let p = &p[..=deg];
    let roots = poly::aberth(deg, 1.0, |z| {
        let (mut v, mut d) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &c in p.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    })?;
    Ok(roots
        .into_iter()
        .filter(|r| (r.norm() - 1.0).abs() <= ON_CIRCLE)
        .map(|r| r.arg())
        .collect())
}
