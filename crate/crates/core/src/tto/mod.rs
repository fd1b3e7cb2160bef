//! Truncated Toeplitz operators on `K_θ`.

mod crofoot;
mod quasisymbol;

pub use crofoot::{crofoot_conjugate, Crofoot};
pub use quasisymbol::{fit_nonneg_quasisymbol, nonneg_quasisymbol, QuasisymbolFit, Support};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::measure::BoundaryMeasure;
use crate::modelspace::{KFun, ModelSpace};
use crate::{cplx, dft, CMatrix, CVector, C64};

/// A symbol, interpreted against normalized Lebesgue measure.
#[derive(Clone, Debug, PartialEq)]
pub enum Symbol {
    /// Two-sided coefficients `φ̂(−K), …, φ̂(K)`.
    Fourier(Vec<C64>),
    /// Samples on the space's grid.
    Grid(Vec<C64>),
    Measure(BoundaryMeasure),
}

impl Symbol {
    /// The half-width `K` of a Fourier symbol.
    pub fn fourier_width(coefs: &[C64]) -> Result<usize> {
        if coefs.len() % 2 == 0 {
            return Err(Error::InvalidArgument(
                "Fourier symbol needs an odd number of coefficients (−K..=K)".into(),
            ));
        }
        Ok(coefs.len() / 2)
    }

    /// Grid samples of a Fourier or grid symbol.
    pub fn samples(&self, n: usize) -> Result<Vec<C64>> {
        match self {
            Symbol::Fourier(coefs) => {
                let k = Self::fourier_width(coefs)?;
                if k > n / 4 {
                    return Err(Error::InvalidArgument(format!(
                        "Fourier symbol width {k} exceeds grid_size/4 = {}",
                        n / 4
                    )));
                }
                let mut wide = vec![C64::new(0.0, 0.0); n];
                for (i, c) in coefs.iter().enumerate() {
                    wide[dft::slot(i as i64 - k as i64, n)] += c;
                }
                Ok(dft::synthesize(&wide))
            }
            Symbol::Grid(s) => {
                if s.len() != n {
                    return Err(Error::InvalidArgument(format!(
                        "grid symbol has {} samples, expected {n}",
                        s.len()
                    )));
                }
                if s.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::InvalidArgument("grid symbol is not finite".into()));
                }
                Ok(s.clone())
            }
            Symbol::Measure(_) => Err(Error::InvalidArgument(
                "a measure has no grid samples".into(),
            )),
        }
    }
}

/// A matrix in the orthonormal basis of `K_θ`, tagged with θ's id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TtoRepr", into = "TtoRepr")]
pub struct TtOperator {
    pub theta_id: String,
    pub matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
struct TtoRepr {
    theta_id: String,
    #[serde(with = "cplx::pairs")]
    matrix: Vec<C64>,
}

impl From<TtOperator> for TtoRepr {
    fn from(a: TtOperator) -> Self {
        // nalgebra stores column-major; transpose for row-major output.
        let matrix = a.matrix.transpose().as_slice().to_vec();
        TtoRepr {
            theta_id: a.theta_id,
            matrix,
        }
    }
}

impl TryFrom<TtoRepr> for TtOperator {
    type Error = Error;
    fn try_from(r: TtoRepr) -> Result<Self> {
        let n = (r.matrix.len() as f64).sqrt().round() as usize;
        if n * n != r.matrix.len() {
            return Err(Error::InvalidArgument("operator matrix is not square".into()));
        }
        Ok(TtOperator {
            theta_id: r.theta_id,
            matrix: CMatrix::from_row_slice(n, n, &r.matrix),
        })
    }
}

impl TtOperator {
    pub fn new(space: &ModelSpace, matrix: CMatrix) -> Self {
        assert_eq!(matrix.shape(), (space.degree(), space.degree()));
        TtOperator {
            theta_id: space.theta_id().to_string(),
            matrix,
        }
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    /// `A f` for `f ∈ K_θ`.
    pub fn apply(&self, f: &KFun) -> KFun {
        KFun {
            theta_id: self.theta_id.clone(),
            coef: (&self.matrix * f.vector()).iter().copied().collect(),
        }
    }

    fn check(&self, space: &ModelSpace) -> Result<()> {
        if self.theta_id != space.theta_id() || self.matrix.nrows() != space.degree() {
            return Err(Error::InvalidArgument(format!(
                "operator tagged {} does not act on the space of {}",
                self.theta_id,
                space.theta_id()
            )));
        }
        Ok(())
    }
}

/// `A_φ = P_θ(φ ·)` by grid quadrature.
pub fn tto_from_symbol(space: &ModelSpace, symbol: &Symbol) -> Result<TtOperator> {
    if let Symbol::Measure(mu) = symbol {
        return tto_from_measure(space, mu);
    }
    let phi = symbol.samples(space.grid_size())?;
    let matrix = match symbol {
        Symbol::Fourier(coefs) if space.has_monomial_basis() => {
            // Exact Toeplitz section: (φ z^j, z^i) = φ̂(i − j).
            let k = (coefs.len() / 2) as i64;
            let n = space.degree();
            CMatrix::from_fn(n, n, |i, j| {
                let d = i as i64 - j as i64;
                if d.abs() <= k {
                    coefs[(d + k) as usize]
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        }
        _ => space.compress(&phi),
    };
    let a = TtOperator::new(space, matrix);
    let sup = phi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let norm = a.norm();
    let limit = sup * (1.0 + 1e-9) + 1e-12;
    if norm > limit {
        return Err(Error::tolerance("symbol norm bound ‖A_φ‖ − sup|φ|", norm - sup, 1e-9 * sup));
    }
    Ok(a)
}

/// `A_μ` with `(A_μ f, g) = ∫ f ḡ dμ`.
pub fn tto_from_measure(space: &ModelSpace, mu: &BoundaryMeasure) -> Result<TtOperator> {
    mu.check_grid(space.grid_size())?;
    mu.check_closed_disk()?;
    Ok(TtOperator::new(space, measure_matrix(space, mu)))
}

pub(crate) fn measure_matrix(space: &ModelSpace, mu: &BoundaryMeasure) -> CMatrix {
    let n = space.degree();
    let mut a = match &mu.density {
        Some(d) => space.compress(d),
        None => CMatrix::zeros(n, n),
    };
    for atom in &mu.atoms {
        let b = space.basis_at(atom.point());
        a += b.conjugate() * b.transpose() * atom.weight;
    }
    a
}

/// Orthonormal basis (columns) of `{f ∈ K_θ : zf ∈ K_θ} = K_θ ⊖ span{k̃₀}`.
fn invariant_subspace(space: &ModelSpace) -> Result<CMatrix> {
    let k0 = space.conj_kernel(C64::new(0.0, 0.0))?;
    Ok(linalg::orthonormal_complement(&k0.vector()))
}

/// Sarason's criterion: `max |(Af,g) − (Azf,zg)| / ‖A‖` over an orthonormal
/// basis of `{f : zf ∈ K_θ}`. Zero exactly for truncated Toeplitz operators.
pub fn sarason_test(space: &ModelSpace, a: &TtOperator) -> Result<f64> {
    a.check(space)?;
    if space.degree() == 1 {
        return Ok(0.0);
    }
    let norm = a.norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let v = invariant_subspace(space)?;
    let zv = space.shift_matrix() * &v;
    let lhs = v.adjoint() * &a.matrix * &v;
    let rhs = zv.adjoint() * &a.matrix * &zv;
    Ok(linalg::max_abs(&(lhs - rhs)) / norm)
}

/// Frobenius-orthonormal basis of `𝒯(θ)`, the null space of the linearized
/// Sarason constraints; its dimension must be `2n − 1`.
pub fn tto_space_basis(space: &ModelSpace) -> Result<Vec<TtOperator>> {
    let n = space.degree();
    let v = invariant_subspace(space)?;
    let zv = space.shift_matrix() * &v;
    let w = v.ncols();
    // Unknown vec(A) is column-major: entry (i, j) sits at i + n·j.
    let mut rows = CMatrix::zeros(w * w, n * n);
    for p in 0..w {
        for q in 0..w {
            let r = p + w * q;
            for j in 0..n {
                for i in 0..n {
                    rows[(r, i + n * j)] =
                        v[(i, p)].conj() * v[(j, q)] - zv[(i, p)].conj() * zv[(j, q)];
                }
            }
        }
    }
    let ns = linalg::null_space(&rows, 1e-10);
    let dim = ns.basis.ncols();
    if ns.gap < 1e6 {
        return Err(Error::IllConditioned(format!(
            "TTO constraint rank is ambiguous: singular-value gap {:.3e} < 1e6",
            ns.gap
        )));
    }
    if dim != 2 * n - 1 {
        return Err(Error::tolerance("TTO space dimension − (2n−1)", dim as f64 - (2 * n - 1) as f64, 0.0));
    }
    Ok((0..dim)
        .map(|k| {
            let col = ns.basis.column(k);
            TtOperator::new(space, CMatrix::from_column_slice(n, n, col.as_slice()))
        })
        .collect())
}

/// The standard symbol `φ₊ + conj(φ₋)` of a TTO, normalized by `φ₋(0) = 0`.
#[derive(Clone, Debug)]
pub struct StandardSymbol {
    pub plus: KFun,
    pub minus: KFun,
    /// Frobenius norm of `A_{φ₊+conj φ₋} − A`.
    pub residual: f64,
}

impl StandardSymbol {
    /// Grid samples of `φ₊ + conj(φ₋)`.
    pub fn samples(&self, space: &ModelSpace) -> Vec<C64> {
        let p = space.samples(&self.plus);
        let m = space.samples(&self.minus);
        p.iter().zip(&m).map(|(a, b)| a + b.conj()).collect()
    }
}

pub fn standard_symbol(space: &ModelSpace, a: &TtOperator) -> Result<StandardSymbol> {
    a.check(space)?;
    let n = space.degree();
    let basis = space.basis();
    let b0 = space.basis_at(C64::new(0.0, 0.0));
    // Columns: vec(A_{b_k}) then vec(A_{conj b_k}); the unknowns for the
    // second block are conj(d_k), which keeps the system complex-linear.
    let mut sys = CMatrix::zeros(n * n + 1, 2 * n);
    for k in 0..n {
        let col: Vec<C64> = basis.column(k).iter().copied().collect();
        let conj_col: Vec<C64> = col.iter().map(|v| v.conj()).collect();
        let ak = space.compress(&col);
        let ck = space.compress(&conj_col);
        sys.view_mut((0, k), (n * n, 1)).copy_from_slice(ak.as_slice());
        sys.view_mut((0, n + k), (n * n, 1)).copy_from_slice(ck.as_slice());
        sys[(n * n, n + k)] = b0[k].conj();
    }
    let mut rhs = CVector::zeros(n * n + 1);
    rhs.rows_mut(0, n * n).copy_from_slice(a.matrix.as_slice());
    let sol = linalg::lstsq(&sys, &rhs);
    let plus = space.kfun(sol.rows(0, n).iter().copied().collect());
    let minus = space.kfun(sol.rows(n, n).iter().map(|v| v.conj()).collect());
    let rebuilt = &sys.rows(0, n * n) * &sol;
    let residual = (rebuilt - rhs.rows(0, n * n)).norm();
    let limit = 1e-8 * a.matrix.norm().max(1.0);
    if residual > limit {
        return Err(Error::tolerance("standard symbol residual (operator not a TTO)", residual, limit));
    }
    Ok(StandardSymbol {
        plus,
        minus,
        residual,
    })
}

/// `T_λ = (·, k_λ) k̃_λ`.
pub fn rank_one(space: &ModelSpace, lambda: C64) -> Result<TtOperator> {
    if lambda.norm() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "rank-one TTO needs |λ| < 1, got {}",
            lambda.norm()
        )));
    }
    let k = space.repro_kernel(lambda)?.vector();
    let kt = space.conj_kernel(lambda)?.vector();
    Ok(TtOperator::new(space, kt * k.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerFunction;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mono(n: usize) -> ModelSpace {
        ModelSpace::new(InnerFunction::monomial(n), 64).unwrap()
    }

    #[test]
    fn constant_symbol_gives_identity() {
        let m = mono(3);
        let a = tto_from_symbol(&m, &Symbol::Fourier(vec![c(1.0, 0.0)])).unwrap();
        assert!(linalg::max_abs(&(a.matrix - CMatrix::identity(3, 3))) < 1e-14);
    }

    #[test]
    fn monomial_toeplitz_path_matches_quadrature() {
        let m = mono(5);
        let coefs: Vec<C64> = (0..7).map(|k| c(k as f64 * 0.3 - 1.0, 0.1 * k as f64)).collect();
        let exact = tto_from_symbol(&m, &Symbol::Fourier(coefs.clone())).unwrap();
        let phi = Symbol::Fourier(coefs).samples(m.grid_size()).unwrap();
        assert!(linalg::max_abs(&(exact.matrix.clone() - m.compress(&phi))) < 1e-14);
        assert_eq!(sarason_test(&m, &exact).unwrap(), 0.0);
        assert!(linalg::max_abs(&(m.shift_matrix() - m.compress(m.nodes()))) < 1e-14);
    }

    #[test]
    fn shift_and_adjoint_in_monomial_basis() {
        let m = mono(3);
        let z = Symbol::Fourier(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let s = tto_from_symbol(&m, &z).unwrap().matrix;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j + 1 { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - want).norm() < 1e-14);
            }
        }
        let m2 = mono(2);
        let zbar = Symbol::Fourier(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let s = tto_from_symbol(&m2, &zbar).unwrap().matrix;
        assert!((s[(0, 1)] - 1.0).norm() < 1e-14 && s[(1, 0)].norm() < 1e-14);
    }

    #[test]
    fn random_matrix_fails_sarason() {
        let m = mono(3);
        let mut a = CMatrix::zeros(3, 3);
        for (k, v) in a.iter_mut().enumerate() {
            *v = c((k as f64 * 1.3).sin(), (k as f64 * 0.7).cos());
        }
        let r = sarason_test(&m, &TtOperator::new(&m, a)).unwrap();
        assert!(r > 1e-3);
    }

    #[test]
    fn toeplitz_matrices_pass_for_monomials() {
        let m = mono(4);
        let mut a = CMatrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                a[(i, j)] = c(i as f64 - j as f64, (i as f64 - j as f64).powi(2));
            }
        }
        assert!(sarason_test(&m, &TtOperator::new(&m, a.clone())).unwrap() < 1e-14);
        a[(0, 0)] += 0.1;
        assert!(sarason_test(&m, &TtOperator::new(&m, a)).unwrap() > 1e-3);
    }

    #[test]
    fn degree_one_is_degenerate() {
        let m = mono(1);
        let a = TtOperator::new(&m, CMatrix::from_element(1, 1, c(3.0, 1.0)));
        assert_eq!(sarason_test(&m, &a).unwrap(), 0.0);
        assert_eq!(tto_space_basis(&m).unwrap().len(), 1);
    }

    #[test]
    fn space_dimension_for_monomial() {
        let m = mono(5);
        let basis = tto_space_basis(&m).unwrap();
        assert_eq!(basis.len(), 9);
        for b in &basis {
            // constant diagonals
            for i in 1..5 {
                for j in 1..5 {
                    assert!((b.matrix[(i, j)] - b.matrix[(i - 1, j - 1)]).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn identity_standard_symbol() {
        let m = mono(3);
        let s = standard_symbol(&m, &TtOperator::new(&m, CMatrix::identity(3, 3))).unwrap();
        assert!((s.plus.coef[0] - 1.0).norm() < 1e-10);
        assert!(s.plus.coef[1..].iter().all(|v| v.norm() < 1e-10));
        assert!(s.minus.norm() < 1e-10);
    }

    #[test]
    fn shift_standard_symbol() {
        let m = mono(3);
        let s = standard_symbol(&m, &TtOperator::new(&m, m.shift_matrix().clone())).unwrap();
        assert!((s.plus.coef[1] - 1.0).norm() < 1e-10);
        assert!(s.plus.coef[0].norm() < 1e-10 && s.plus.coef[2].norm() < 1e-10);
        assert!(s.minus.norm() < 1e-10);
    }

    #[test]
    fn rank_one_at_origin_is_nilpotent() {
        let m = mono(2);
        let t = rank_one(&m, c(0.0, 0.0)).unwrap().matrix;
        // (·, 1) z: sends 1 to z.
        assert!((t[(1, 0)] - 1.0).norm() < 1e-15);
        assert!(t[(0, 0)].norm() + t[(0, 1)].norm() + t[(1, 1)].norm() < 1e-15);
        assert!((&t * &t).norm() < 1e-15);
    }

    #[test]
    fn dirac_measure_gives_kernel_outer_product() {
        let th = InnerFunction::new(vec![c(0.3, 0.2), c(-0.4, 0.1)], c(1.0, 0.0)).unwrap();
        let m = ModelSpace::new(th, 256).unwrap();
        let x = 0.8;
        let a = tto_from_measure(&m, &BoundaryMeasure::dirac(x, c(1.0, 0.0))).unwrap();
        let k = m.repro_kernel(C64::from_polar(1.0, x)).unwrap().vector();
        assert!(linalg::max_abs(&(a.matrix - &k * k.adjoint())) < 1e-13);
    }

    #[test]
    fn json_is_row_major() {
        let m = mono(2);
        let a = TtOperator::new(&m, CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]));
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.contains(r#""matrix":[[1.0,0.0],[2.0,0.0],[3.0,0.0],[4.0,0.0]]"#));
        let back: TtOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
