//! DFT bridge between boundary samples and Fourier coefficients.
//!
//! Samples live at `t_j = exp(2πij/N)`. Coefficient index `i` carries
//! frequency `i` for `i < N/2` and `i - N` otherwise, so `N/2` counts as
//! negative.

use std::cell::RefCell;

use rustfft::FftPlanner;

use crate::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Signed frequency of coefficient slot `i` on an `n`-point grid.
pub fn frequency(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Slot holding signed frequency `m` on an `n`-point grid.
pub fn slot(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Fourier coefficients `c_m = (1/N) Σ_j f_j t_j^{-m}`.
pub fn coefficients(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Inverse of [`coefficients`]: `f_j = Σ_m c_m t_j^m`.
pub fn synthesize(coefs: &[C64]) -> Vec<C64> {
    let n = coefs.len();
    let mut buf = coefs.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf
}

/// Largest coefficient magnitude at negative frequencies.
pub fn negative_tail(samples: &[C64]) -> f64 {
    let n = samples.len();
    coefficients(samples)[n / 2..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Riesz projection `P₊`: keep frequencies `m ≥ 0`.
pub fn riesz_projection(samples: &[C64]) -> Vec<C64> {
    let n = samples.len();
    let mut c = coefficients(samples);
    c[n / 2..].iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
    synthesize(&c)
}

/// Band-limited interpolation onto a grid `factor` times finer.
pub fn upsample(samples: &[C64], factor: usize) -> Vec<C64> {
    if factor == 1 {
        return samples.to_vec();
    }
    let n = samples.len();
    let big = n * factor;
    let c = coefficients(samples);
    let mut wide = vec![C64::new(0.0, 0.0); big];
    for (i, ci) in c.iter().enumerate() {
        let m = frequency(i, n);
        // The Nyquist slot is split evenly so real data stays real.
        if m == -(n as i64) / 2 {
            wide[slot(m, big)] += *ci * 0.5;
            wide[slot(-m, big)] += *ci * 0.5;
        } else {
            wide[slot(m, big)] = *ci;
        }
    }
    synthesize(&wide)
}

/// Evaluate the trigonometric interpolant of `coefs` at angle `x`.
pub fn eval_at(coefs: &[C64], x: f64) -> C64 {
    let n = coefs.len();
    let step = C64::from_polar(1.0, x);
    let mut acc = coefs[0];
    let mut pos = step;
    let mut neg = step.conj();
    for m in 1..n / 2 {
        acc += coefs[m] * pos + coefs[n - m] * neg;
        pos *= step;
        neg *= step.conj();
    }
    // Nyquist term, symmetrized.
    let half = coefs[n / 2] * 0.5;
    acc + half * (pos + neg)
}

/// The uniform grid `t_j = exp(2πij/N)`.
pub fn nodes(n: usize) -> Vec<C64> {
    (0..n)
        .map(|j| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_of_monomial() {
        let t = nodes(16);
        let s: Vec<C64> = t.iter().map(|z| z.powi(3) + z.conj() * 2.0).collect();
        let c = coefficients(&s);
        assert!((c[3] - 1.0).norm() < 1e-14);
        assert!((c[15] - 2.0).norm() < 1e-14);
        assert!(negative_tail(&s) > 1.9);
        let back = synthesize(&c);
        for (a, b) in back.iter().zip(&s) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn upsample_is_exact_for_trig_polys() {
        let s: Vec<C64> = nodes(32).iter().map(|z| z.powi(5) + z.powi(-4) * 0.5).collect();
        let up = upsample(&s, 4);
        for (j, z) in nodes(128).iter().enumerate() {
            let want = z.powi(5) + z.powi(-4) * 0.5;
            assert!((up[j] - want).norm() < 1e-13);
        }
        let c = coefficients(&s);
        let x = 0.377;
        let z = C64::from_polar(1.0, x);
        assert!((eval_at(&c, x) - (z.powi(5) + z.powi(-4) * 0.5)).norm() < 1e-13);
    }

    #[test]
    fn riesz_projection_drops_conjugate_part() {
        let s: Vec<C64> = nodes(64).iter().map(|z| z.powi(2) + z.conj()).collect();
        let p = riesz_projection(&s);
        for (z, v) in nodes(64).iter().zip(&p) {
            assert!((v - z.powi(2)).norm() < 1e-14);
        }
    }
}
