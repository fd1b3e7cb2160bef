//! Crofoot transform `U f = √(1−|w|²) f/(1 − w̄θ)`, a unitary map from
//! `K_θ` onto `K_Θ` with Θ the Frostman shift of θ by `w`.

use crate::error::{Error, Result};
use crate::measure::BoundaryMeasure;
use crate::modelspace::{KFun, ModelSpace};
use crate::tto::TtOperator;
use crate::{linalg, CMatrix, C64};

#[derive(Clone, Debug)]
pub struct Crofoot {
    pub w: C64,
    /// `K_Θ`, on the same grid as the source space.
    pub target: ModelSpace,
    /// Matrix of `U` from the basis of `K_θ` to the basis of `K_Θ`.
    pub u: CMatrix,
    /// `max |U*U − I|`.
    pub unitarity: f64,
}

impl Crofoot {
    pub fn new(space: &ModelSpace, w: C64) -> Result<Self> {
        let big_theta = space.theta().frostman_shift(w)?;
        let target = ModelSpace::new(big_theta, space.grid_size())?;
        let s = (1.0 - w.norm_sqr()).sqrt();
        let n = space.degree();
        let mut ub = space.basis().clone();
        for (j, mut row) in ub.row_iter_mut().enumerate() {
            let th = space.theta_samples()[j];
            row *= C64::new(s, 0.0) / (C64::new(1.0, 0.0) - w.conj() * th);
        }
        let scale = C64::new(1.0 / space.grid_size() as f64, 0.0);
        let u = target.basis().adjoint() * ub * scale;
        let unitarity = linalg::max_abs(&(u.adjoint() * &u - CMatrix::identity(n, n)));
        if unitarity > 1e-8 {
            return Err(Error::tolerance("crofoot unitarity", unitarity, 1e-8));
        }
        Ok(Crofoot {
            w,
            target,
            u,
            unitarity,
        })
    }

    /// `U A U*`, an operator on `K_Θ`.
    pub fn forward(&self, a: &TtOperator) -> TtOperator {
        TtOperator::new(&self.target, &self.u * &a.matrix * self.u.adjoint())
    }

    /// `U* B U`, an operator on `K_θ`.
    pub fn backward(&self, source: &ModelSpace, b: &TtOperator) -> TtOperator {
        TtOperator::new(source, self.u.adjoint() * &b.matrix * &self.u)
    }

    pub fn map(&self, f: &KFun) -> KFun {
        self.target
            .kfun((&self.u * f.vector()).iter().copied().collect())
    }

    pub fn unmap(&self, source: &ModelSpace, g: &KFun) -> KFun {
        source.kfun((self.u.adjoint() * g.vector()).iter().copied().collect())
    }

    /// `ν = (1−|w|²)/|1 − w̄θ|² · μ`: if `μ` is a quasisymbol of `B` on `K_Θ`,
    /// then `ν` is a quasisymbol of `U* B U` on `K_θ`.
    pub fn pull_back_measure(&self, source: &ModelSpace, mu: &BoundaryMeasure) -> BoundaryMeasure {
        let theta = source.theta();
        let factor = |th: C64| (1.0 - self.w.norm_sqr()) / (C64::new(1.0, 0.0) - self.w.conj() * th).norm_sqr();
        let mut out = mu.clone();
        for atom in &mut out.atoms {
            atom.weight *= factor(theta.value(atom.point()));
        }
        if let Some(d) = &mut out.density {
            for (v, th) in d.iter_mut().zip(source.theta_samples()) {
                *v *= factor(*th);
            }
        }
        out
    }
}

/// `U A U*` on `K_Θ` together with the transform used.
pub fn crofoot_conjugate(space: &ModelSpace, a: &TtOperator, w: C64) -> Result<(Crofoot, TtOperator)> {
    let cf = Crofoot::new(space, w)?;
    let b = cf.forward(a);
    Ok((cf, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerFunction;

    #[test]
    fn zero_parameter_is_identity() {
        let th = InnerFunction::new(vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.5)], C64::new(0.0, 1.0)).unwrap();
        let m = ModelSpace::new(th, 256).unwrap();
        let cf = Crofoot::new(&m, C64::new(0.0, 0.0)).unwrap();
        assert!(linalg::max_abs(&(cf.u - CMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn single_zero_shift_to_origin() {
        let th = InnerFunction::new(vec![C64::new(0.5, 0.0)], C64::new(1.0, 0.0)).unwrap();
        let m = ModelSpace::new(th.clone(), 256).unwrap();
        let cf = Crofoot::new(&m, th.value(C64::new(0.0, 0.0))).unwrap();
        assert!(cf.target.theta().value(C64::new(0.0, 0.0)).norm() < 1e-12);
        assert!(cf.unitarity < 1e-10);
    }
}
