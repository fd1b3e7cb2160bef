//! The model space `K_θ` in the Takenaka–Malmquist basis.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inner::{mobius, InnerFunction};
use crate::{cplx, dft, CMatrix, CVector, C64};

/// `K_θ` for a finite Blaschke product θ, with the orthonormal basis
/// sampled on the uniform grid `t_j = exp(2πij/N)`.
#[derive(Clone, Debug)]
pub struct ModelSpace {
    theta: InnerFunction,
    theta_id: String,
    nodes: Vec<C64>,
    theta_samples: Vec<C64>,
    basis: CMatrix,
    shift: OnceLock<CMatrix>,
}

/// An element of `K_θ`: coefficients in the orthonormal basis, tagged with
/// the id of θ so that mixing spaces is caught.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KFun {
    pub theta_id: String,
    #[serde(with = "cplx::pairs")]
    pub coef: Vec<C64>,
}

impl KFun {
    pub fn norm(&self) -> f64 {
        self.coef.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(f, g)` in `K_θ`.
    pub fn inner(&self, other: &KFun) -> C64 {
        self.coef
            .iter()
            .zip(&other.coef)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn scaled(&self, s: C64) -> KFun {
        KFun {
            theta_id: self.theta_id.clone(),
            coef: self.coef.iter().map(|c| c * s).collect(),
        }
    }

    pub fn vector(&self) -> CVector {
        CVector::from_column_slice(&self.coef)
    }
}

impl ModelSpace {
    /// Builds the sampled basis and validates its Gram matrix (`build_space`).
    pub fn new(theta: InnerFunction, grid_size: usize) -> Result<Self> {
        let n = theta.degree();
        if n == 0 {
            return Err(Error::InvalidArgument("model space needs degree ≥ 1".into()));
        }
        if !grid_size.is_power_of_two() || grid_size < 8 * n {
            return Err(Error::InvalidArgument(format!(
                "grid size must be a power of two ≥ 8·degree = {}, got {grid_size}",
                8 * n
            )));
        }
        let nodes = dft::nodes(grid_size);
        let mut basis = CMatrix::zeros(grid_size, n);
        let mut theta_samples = Vec::with_capacity(grid_size);
        for (j, &t) in nodes.iter().enumerate() {
            let mut prod = C64::new(1.0, 0.0);
            for (k, &a) in theta.zeros().iter().enumerate() {
                basis[(j, k)] = prod * normalized_cauchy(a, t);
                prod *= mobius(a, t);
            }
            theta_samples.push(theta.front() * prod);
        }
        let space = ModelSpace {
            theta_id: theta.theta_id(),
            theta,
            nodes,
            theta_samples,
            basis,
            shift: OnceLock::new(),
        };
        let gram = space.gram_deviation();
        if gram > 1e-8 {
            return Err(Error::tolerance("basis gram deviation (grid too coarse)", gram, 1e-8));
        }
        Ok(space)
    }

    pub fn with_default_grid(theta: InnerFunction) -> Result<Self> {
        Self::new(theta, crate::DEFAULT_GRID)
    }

    pub fn theta(&self) -> &InnerFunction {
        &self.theta
    }

    pub fn theta_id(&self) -> &str {
        &self.theta_id
    }

    pub fn degree(&self) -> usize {
        self.theta.degree()
    }

    pub fn grid_size(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[C64] {
        &self.nodes
    }

    pub fn theta_samples(&self) -> &[C64] {
        &self.theta_samples
    }

    /// Grid samples of the basis, one column per basis function.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Matrix of the compressed shift `S_θ = A_z`, computed once.
    pub fn shift_matrix(&self) -> &CMatrix {
        self.shift.get_or_init(|| {
            if self.has_monomial_basis() {
                let n = self.degree();
                CMatrix::from_fn(n, n, |i, j| C64::new(if i == j + 1 { 1.0 } else { 0.0 }, 0.0))
            } else {
                self.compress(self.nodes())
            }
        })
    }

    /// True when every zero of θ sits at the origin, so the basis is `1, z, …, z^{n−1}`.
    pub fn has_monomial_basis(&self) -> bool {
        self.theta.zeros().iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    /// `(1/N) Σ_t φ(t) b_j(t) conj(b_i(t))`: the compression of multiplication
    /// by grid samples `phi`.
    pub fn compress(&self, phi: &[C64]) -> CMatrix {
        assert_eq!(phi.len(), self.grid_size());
        let scale = 1.0 / self.grid_size() as f64;
        let mut weighted = self.basis.clone();
        for (j, mut row) in weighted.row_iter_mut().enumerate() {
            row *= phi[j] * scale;
        }
        self.basis.adjoint() * weighted
    }

    /// `max |G − I|` for the quadrature Gram matrix of the basis.
    pub fn gram_deviation(&self) -> f64 {
        let n = self.degree();
        let scale = C64::new(1.0 / self.grid_size() as f64, 0.0);
        let gram = self.basis.adjoint() * &self.basis * scale;
        let dev = gram - CMatrix::identity(n, n);
        crate::linalg::max_abs(&dev)
    }

    /// `(b_0(z), …, b_{n−1}(z))`. Valid on a neighbourhood of the closed disk.
    pub fn basis_at(&self, z: C64) -> CVector {
        let mut out = CVector::zeros(self.degree());
        let mut prod = C64::new(1.0, 0.0);
        for (k, &a) in self.theta.zeros().iter().enumerate() {
            out[k] = prod * normalized_cauchy(a, z);
            prod *= mobius(a, z);
        }
        out
    }

    pub fn zero(&self) -> KFun {
        self.kfun(vec![C64::new(0.0, 0.0); self.degree()])
    }

    /// Wraps a coefficient vector as an element of this space.
    pub fn kfun(&self, coef: Vec<C64>) -> KFun {
        assert_eq!(coef.len(), self.degree(), "coefficient length must equal the degree");
        KFun {
            theta_id: self.theta_id.clone(),
            coef,
        }
    }

    /// Checks that `f` belongs to this space.
    pub fn check(&self, f: &KFun) -> Result<()> {
        if f.theta_id != self.theta_id || f.coef.len() != self.degree() {
            return Err(Error::InvalidArgument(format!(
                "function tagged {} does not belong to the space of {}",
                f.theta_id, self.theta_id
            )));
        }
        Ok(())
    }

    pub fn samples(&self, f: &KFun) -> Vec<C64> {
        (&self.basis * f.vector()).iter().copied().collect()
    }

    /// `f(z)` for `z` in the closed disk.
    pub fn eval(&self, f: &KFun, z: C64) -> C64 {
        self.basis_at(z).iter().zip(&f.coef).map(|(b, c)| b * c).sum()
    }

    /// Orthogonal projection `P_θ` of grid samples, by quadrature against the basis.
    pub fn project(&self, samples: &[C64]) -> KFun {
        assert_eq!(samples.len(), self.grid_size());
        let s = CVector::from_column_slice(samples);
        let scale = C64::new(1.0 / self.grid_size() as f64, 0.0);
        let coef = self.basis.adjoint() * s * scale;
        self.kfun(coef.iter().copied().collect())
    }

    /// `P₊f − θP₊(θ̄f)` on the grid, computed with DFT truncation.
    pub fn project_by_dft(&self, samples: &[C64]) -> Vec<C64> {
        let plus = dft::riesz_projection(samples);
        let tbar_f: Vec<C64> = samples
            .iter()
            .zip(&self.theta_samples)
            .map(|(f, t)| t.conj() * f)
            .collect();
        let inner = dft::riesz_projection(&tbar_f);
        plus.iter()
            .zip(inner.iter().zip(&self.theta_samples))
            .map(|(p, (q, t))| p - t * q)
            .collect()
    }

    /// Root-mean-square distance of grid samples from `K_θ`.
    pub fn projection_residual(&self, samples: &[C64]) -> f64 {
        let back = self.samples(&self.project(samples));
        rms_diff(samples, &back)
    }

    /// Reproducing kernel `k_λ = (1 − conj(θ(λ))θ)/(1 − λ̄z)`.
    pub fn repro_kernel(&self, lambda: C64) -> Result<KFun> {
        check_closed_disk(lambda)?;
        let b = self.basis_at(lambda);
        Ok(self.kfun(b.iter().map(|v| v.conj()).collect()))
    }

    /// Conjugate kernel `k̃_λ = (θ − θ(λ))/(z − λ)`.
    ///
    /// Its coefficients are `(k̃_λ, b_k) = (b̃_k)(λ)`, where
    /// `b̃_k = front·√(1−|a_k|²)/(1−ā_k z)·Π_{j>k} (z−a_j)/(1−ā_j z)`.
    pub fn conj_kernel(&self, lambda: C64) -> Result<KFun> {
        check_closed_disk(lambda)?;
        let zeros = self.theta.zeros();
        let n = zeros.len();
        let mut coef = vec![C64::new(0.0, 0.0); n];
        let mut tail = self.theta.front();
        for k in (0..n).rev() {
            coef[k] = tail * normalized_cauchy(zeros[k], lambda);
            tail *= mobius(zeros[k], lambda);
        }
        Ok(self.kfun(coef))
    }

    /// The antilinear isometry `f ↦ z̄θ·conj(f)`, realized on the grid.
    pub fn involution(&self, f: &KFun) -> Result<KFun> {
        self.check(f)?;
        let s = self.samples(f);
        let g: Vec<C64> = s
            .iter()
            .zip(self.nodes.iter().zip(&self.theta_samples))
            .map(|(v, (t, th))| t.conj() * th * v.conj())
            .collect();
        let out = self.project(&g);
        let residual = rms_diff(&g, &self.samples(&out));
        let limit = 1e-9 * f.norm().max(f64::MIN_POSITIVE);
        if residual > limit && residual > 1e-300 {
            return Err(Error::tolerance("involution projection residual", residual, limit));
        }
        Ok(out)
    }

    /// `(1/N) Σ |f(t_j)|`.
    pub fn l1_norm(samples: &[C64]) -> f64 {
        samples.iter().map(|v| v.norm()).sum::<f64>() / samples.len() as f64
    }
}

/// `√(1−|a|²)/(1 − ā z)`.
#[inline]
pub(crate) fn normalized_cauchy(a: C64, z: C64) -> C64 {
    C64::new((1.0 - a.norm_sqr()).sqrt(), 0.0) / (C64::new(1.0, 0.0) - a.conj() * z)
}

fn check_closed_disk(z: C64) -> Result<()> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::OutsideDisk { modulus: z.norm() });
    }
    Ok(())
}

pub(crate) fn rms_diff(a: &[C64], b: &[C64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s / a.len() as f64).sqrt()
}
