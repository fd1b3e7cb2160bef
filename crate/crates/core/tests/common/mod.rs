#![allow(dead_code)]

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use ttolab::{random, ModelSpace, PwFunction, C64};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `Σ c_k z^k` evaluated on the space's grid.
pub fn poly_samples(space: &ModelSpace, coefs: &[C64]) -> Vec<C64> {
    space
        .nodes()
        .iter()
        .map(|z| coefs.iter().rev().fold(c(0.0, 0.0), |acc, b| acc * z + b))
        .collect()
}

/// Grid samples of `x·conj(y)` for random `x, y ∈ K_θ`.
pub fn random_x_element(rng: &mut ChaCha8Rng, space: &ModelSpace) -> Vec<C64> {
    let x = space.samples(&random::kfun(rng, space));
    let y = space.samples(&random::kfun(rng, space));
    x.iter().zip(&y).map(|(a, b)| a * b.conj()).collect()
}

/// A real element of `X`: the real part of a sum of two random products.
pub fn random_real_x(rng: &mut ChaCha8Rng, space: &ModelSpace) -> Vec<f64> {
    let a = random_x_element(rng, space);
    let b = random_x_element(rng, space);
    a.iter().zip(&b).map(|(u, v)| (u + v).re).collect()
}

/// Grid samples of `x·y` for random `x, y ∈ K_θ`.
pub fn random_product(rng: &mut ChaCha8Rng, space: &ModelSpace) -> Vec<C64> {
    let x = space.samples(&random::kfun(rng, space));
    let y = space.samples(&random::kfun(rng, space));
    x.iter().zip(&y).map(|(a, b)| a * b).collect()
}

pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `Σ a_k sinc⁴((t − s_k)/4)` with random real amplitudes and shifts, a real
/// element of `PW¹_π` with fast decay.
pub fn random_pw(rng: &mut ChaCha8Rng, window: usize) -> PwFunction {
    let terms: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 16.0 - 8.0))
        .collect();
    PwFunction::sample(window, |t| {
        c(terms.iter().map(|(a, s)| a * sinc((t - s) / 4.0).powi(4)).sum(), 0.0)
    })
    .expect("sinc⁴ sums decay fast enough")
}
