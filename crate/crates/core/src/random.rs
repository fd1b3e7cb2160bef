//! Seeded generators for test data: Blaschke products, model-space
//! elements, trigonometric polynomials.

use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::inner::InnerFunction;
use crate::modelspace::{KFun, ModelSpace};
use crate::C64;

pub fn normal_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// A point of the disk `|z| < radius_max`, uniform in area.
pub fn disk_point<R: Rng + ?Sized>(rng: &mut R, radius_max: f64) -> C64 {
    let r = radius_max * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random::<f64>() * TAU)
}

pub fn unimodular<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random::<f64>() * TAU)
}

/// Random Blaschke product with zeros in `|z| < radius_max` and a random front.
/// With `zero_at_origin` the first zero is 0, so θ(0) = 0.
pub fn blaschke<R: Rng + ?Sized>(
    rng: &mut R,
    degree: usize,
    radius_max: f64,
    zero_at_origin: bool,
) -> InnerFunction {
    let mut zeros: Vec<C64> = (0..degree).map(|_| disk_point(rng, radius_max)).collect();
    if zero_at_origin && degree > 0 {
        zeros[0] = C64::new(0.0, 0.0);
    }
    InnerFunction::new(zeros, unimodular(rng)).expect("zeros drawn inside the disk")
}

/// Gaussian coefficient vector normalized to unit norm.
pub fn unit_kfun<R: Rng + ?Sized>(rng: &mut R, space: &ModelSpace) -> KFun {
    let f = space.kfun((0..space.degree()).map(|_| normal_c64(rng)).collect());
    let n = f.norm();
    f.scaled(C64::new(1.0 / n, 0.0))
}

pub fn kfun<R: Rng + ?Sized>(rng: &mut R, space: &ModelSpace) -> KFun {
    space.kfun((0..space.degree()).map(|_| normal_c64(rng)).collect())
}

/// Two-sided Fourier coefficients `φ̂(−k..=k)` with Gaussian entries,
/// stored in index order `−k, …, k`.
pub fn trig_poly<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<C64> {
    (0..2 * k + 1).map(|_| normal_c64(rng)).collect()
}

/// Analytic polynomial coefficients `ĉ(0..=k)`.
pub fn analytic_poly<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<C64> {
    (0..=k).map(|_| normal_c64(rng)).collect()
}
