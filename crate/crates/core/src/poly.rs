//! Simultaneous root extraction (Aberth–Ehrlich) for functions supplied as
//! value/derivative pairs, so polynomials never need expanding into
//! monomial coefficients.

use crate::error::{Error, Result};
use crate::C64;

const MAX_SWEEPS: usize = 2000;

/// All `degree` roots of the polynomial evaluated by `eval`, which returns
/// `(p(z), p'(z))`. Initial guesses sit on a circle of radius `radius`.
pub fn aberth<F>(degree: usize, radius: f64, eval: F) -> Result<Vec<C64>>
where
    F: Fn(C64) -> (C64, C64),
{
    if degree == 0 {
        return Ok(Vec::new());
    }
    let mut roots: Vec<C64> = (0..degree)
        .map(|k| {
            // Off-axis start avoids symmetric stagnation.
            let angle = std::f64::consts::TAU * (k as f64 + 0.25) / degree as f64 + 0.4;
            C64::from_polar(radius, angle)
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let z = roots[i];
            let (p, dp) = eval(z);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = if dp.norm() == 0.0 {
                // Nudge off a critical point.
                C64::new(1e-3, 1e-3)
            } else {
                p / dp
            };
            let repulsion: C64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &r)| {
                    let d = z - r;
                    if d.norm() == 0.0 {
                        C64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
            roots[i] = z - step;
            max_step = max_step.max(step.norm() / z.norm().max(1.0));
        }
        if max_step < 1e-15 {
            return Ok(polish(roots, &eval));
        }
    }
    // Clustered roots converge linearly; accept the iterate if residuals are small.
    let roots = polish(roots, &eval);
    if roots.iter().all(|&r| eval(r).0.norm() < 1e-10) {
        Ok(roots)
    } else {
        Err(Error::NoConvergence {
            what: "Aberth root extraction".into(),
        })
    }
}

fn polish<F>(mut roots: Vec<C64>, eval: &F) -> Vec<C64>
where
    F: Fn(C64) -> (C64, C64),
{
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*r);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *r - p / dp;
            if eval(next).0.norm() < p.norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots() {
        let want = [C64::new(0.5, 0.0), C64::new(-0.2, 0.3), C64::new(0.1, -0.7)];
        let eval = |z: C64| {
            let mut p = C64::new(1.0, 0.0);
            let mut dp = C64::new(0.0, 0.0);
            for &a in &want {
                dp = dp * (z - a) + p;
                p *= z - a;
            }
            (p, dp)
        };
        let mut got = aberth(3, 0.5, eval).unwrap();
        for w in want {
            let (k, _) = got
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - w).norm().total_cmp(&(b.1 - w).norm()))
                .unwrap();
            assert!((got[k] - w).norm() < 1e-13);
            got.remove(k);
        }
    }

    #[test]
    fn double_root_is_accepted() {
        let eval = |z: C64| ((z - 0.3) * (z - 0.3), (z - 0.3) * 2.0);
        let got = aberth(2, 0.5, eval).unwrap();
        for r in got {
            assert!((r - 0.3).norm() < 1e-6);
        }
    }
}
