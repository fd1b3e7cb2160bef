//! Two-sided bounds for the norm of `X = {Σ x_k ȳ_k}`.
//!
//! `h ∈ X` is represented by matrices `M` with `h = Σ M_ij b_i conj(b_j)`.
//! Two representations differ by a matrix orthogonal to `𝒯(θ)`, every
//! factorization `Σ x_k ȳ_k` corresponds to `M = Σ x_k y_k*`, and
//! `‖h‖_X = min ‖M‖_*`. Any feasible `M` gives an upper bound; any `A ∈ 𝒯(θ)`
//! with `‖A‖ ≤ 1` gives the lower bound `|tr(AM)| = |Σ (Ax_k, y_k)|`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::factorize4;
use crate::modelspace::{KFun, ModelSpace};
use crate::tto::{rank_one, tto_space_basis};
use crate::{dft, linalg, CMatrix, CVector, C64};

#[derive(Clone, Debug, Serialize)]
pub struct XNormBounds {
    pub lower: f64,
    pub upper: f64,
    /// `‖h‖₁`, itself a lower bound.
    pub l1: f64,
    /// `Σ‖x_k‖‖y_k‖` of the four-term factorization of `z̄θh`.
    pub factorization_constant: f64,
    /// Smallest nuclear norm found among representations of `h`.
    pub nuclear_upper: f64,
    /// `h = Σ x_k conj(y_k)` from the factorization.
    #[serde(skip)]
    pub pairs: Vec<(KFun, KFun)>,
}

impl XNormBounds {
    /// `Σ (A x_k, y_k)` over the stored representation.
    pub fn pairing(&self, a: &CMatrix) -> C64 {
        self.pairs
            .iter()
            .map(|(x, y)| (y.vector().adjoint() * a * x.vector())[(0, 0)])
            .sum()
    }
}

/// Iteration cap for the nuclear-norm refinement.
pub const MAX_ITERATIONS: usize = 3000;

pub fn xnorm_bounds(space: &ModelSpace, h: &[C64]) -> Result<XNormBounds> {
    let n = space.grid_size();
    if h.len() != n {
        return Err(Error::InvalidArgument(format!("expected {n} samples, got {}", h.len())));
    }
    let l1 = ModelSpace::l1_norm(h);
    let shift: Vec<C64> = space
        .nodes()
        .iter()
        .zip(space.theta_samples())
        .map(|(t, th)| t.conj() * th)
        .collect();
    let f: Vec<C64> = h.iter().zip(&shift).map(|(v, s)| s * v).collect();
    let fc: Vec<C64> = h.iter().zip(&shift).map(|(v, s)| s * v.conj()).collect();
    let tail = dft::negative_tail(&f).max(dft::negative_tail(&fc));
    if tail > 1e-8 * l1.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!("h is not in X: DFT tail {tail:.3e}")));
    }
    if l1 == 0.0 {
        return Ok(XNormBounds {
            lower: 0.0,
            upper: 0.0,
            l1,
            factorization_constant: 0.0,
            nuclear_upper: 0.0,
            pairs: Vec::new(),
        });
    }

    // f = Σ x_k y_k gives h = zθ̄f = Σ x_k conj(ỹ_k).
    let fac = factorize4(space, &f)?;
    let mut pairs = Vec::with_capacity(fac.pairs.len());
    for p in &fac.pairs {
        pairs.push((p.x.clone(), space.involution(&p.y)?));
    }
    let dim = space.degree();
    let mut m0 = CMatrix::zeros(dim, dim);
    for (x, y) in &pairs {
        m0 += x.vector() * y.vector().adjoint();
    }

    let frame = tto_frame(space)?;
    let mut lower = l1;
    for col in frame.column_iter() {
        let a = unvec(&col.into_owned(), dim);
        lower = lower.max(functional(&a, &m0));
    }
    lower = lower.max(functional(&CMatrix::identity(dim, dim), &m0));
    let (nuclear_upper, dual) = minimize_nuclear(&frame, &m0, MAX_ITERATIONS);
    lower = lower.max(dual);
    let upper = fac.constant.min(nuclear_upper);
    Ok(XNormBounds {
        lower,
        upper,
        l1,
        factorization_constant: fac.constant,
        nuclear_upper,
        pairs,
    })
}

/// `|tr(AM)|/‖A‖`.
fn functional(a: &CMatrix, m: &CMatrix) -> f64 {
    let s = linalg::spectral_norm(a);
    if s == 0.0 {
        return 0.0;
    }
    (a * m).trace().norm() / s
}

fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

fn unvec(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Orthonormal basis of `𝒯(θ)` (vectorized, column-major), spanned by the
/// rank-one operators `T_λ` and their adjoints.
pub(crate) fn tto_frame(space: &ModelSpace) -> Result<CMatrix> {
    let n = space.degree();
    let dim = 2 * n - 1;
    let count = 2 * n;
    let mut cols = Vec::with_capacity(2 * count);
    for j in 0..count {
        let lambda = C64::from_polar(0.5, std::f64::consts::TAU * (j as f64 + 0.5) / count as f64);
        let t = rank_one(space, lambda)?.matrix;
        cols.push(vec_of(&t));
        cols.push(vec_of(&t.adjoint()));
    }
    let stacked = CMatrix::from_columns(&cols);
    let svd = stacked.svd(true, false);
    let u = svd.u.expect("requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let spans = sv[dim - 1] > 1e-8 * sv[0] && sv.get(dim).is_none_or(|&s| s < 1e-10 * sv[0]);
    if spans {
        let picked: Vec<CVector> = order[..dim].iter().map(|&i| u.column(i).into_owned()).collect();
        return Ok(CMatrix::from_columns(&picked));
    }
    let basis: Vec<CVector> = tto_space_basis(space)?.iter().map(|a| vec_of(&a.matrix)).collect();
    let qr = CMatrix::from_columns(&basis).qr();
    Ok(qr.q())
}

fn nuclear_norm(m: &CMatrix) -> f64 {
    m.singular_values().iter().sum()
}

fn soft_threshold(m: &CMatrix, gamma: f64) -> CMatrix {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let s = CMatrix::from_diagonal(&svd.singular_values.map(|v| C64::new((v - gamma).max(0.0), 0.0)));
    u * s * vt
}

/// Douglas–Rachford on `min ‖M‖_*` over `M₀ + 𝒯(θ)^⊥`. Returns the best
/// feasible nuclear norm and the best dual lower bound, both at the scale of `M₀`.
fn minimize_nuclear(frame: &CMatrix, m0: &CMatrix, max_iter: usize) -> (f64, f64) {
    let n = m0.nrows();
    let proj = |m: &CMatrix| -> CMatrix {
        let c = frame.adjoint() * vec_of(m);
        unvec(&(frame * c), n)
    };
    let scale = m0.norm();
    let start = m0 / C64::new(scale, 0.0);
    let fixed = proj(&start);
    let gamma = 0.5 / (n as f64).sqrt();
    let mut y = start.clone();
    let mut upper = nuclear_norm(&start);
    let mut lower: f64 = 0.0;
    for it in 0..max_iter {
        let x = soft_threshold(&y, gamma);
        let r = &x * C64::new(2.0, 0.0) - &y;
        let z = &r - proj(&r) + &fixed;
        if it % 10 == 9 || it + 1 == max_iter {
            upper = upper.min(nuclear_norm(&z));
            // (y − x)/γ is a subgradient of ‖·‖_* at x; its 𝒯(θ)-part certifies.
            let g = proj(&((&y - &x) / C64::new(gamma, 0.0))).adjoint();
            lower = lower.max(functional(&g, &start));
            if upper - lower <= 1e-9 * upper {
                break;
            }
        }
        y += &z - &x;
    }
    (upper * scale, lower * scale)
}
