//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::{CMatrix, CVector, C64};

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of the complement of `v` in `Cⁿ`, built
/// from the Householder reflector that maps `e₁` onto the direction of `v`.
pub fn orthonormal_complement(v: &CVector) -> CMatrix {
    let n = v.len();
    let norm = v.norm();
    if n <= 1 || norm == 0.0 {
        return if norm == 0.0 {
            CMatrix::identity(n, n)
        } else {
            CMatrix::zeros(n, 0)
        };
    }
    let u = v / C64::new(norm, 0.0);
    let phase = if u[0].norm() == 0.0 {
        C64::new(1.0, 0.0)
    } else {
        u[0] / u[0].norm()
    };
    // w = u + phase e1; H = I - 2 w w* / |w|² maps e1 to -phase^{-1}... direction of u.
    let mut w = u.clone();
    w[0] += phase;
    let wn = w.norm_squared();
    let mut h = CMatrix::identity(n, n);
    h -= (&w * w.adjoint()) * C64::new(2.0 / wn, 0.0);
    h.columns(1, n - 1).into_owned()
}

/// Least-squares solution of `a x ≈ b` via SVD.
pub fn lstsq(a: &CMatrix, b: &CVector) -> CVector {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(b, smax * 1e-13).expect("svd computed with u and v")
}

/// Real least squares via SVD.
pub fn lstsq_real(a: &DMatrix<f64>, b: &DVector<f64>, rcond: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.solve(b, smax * rcond).expect("svd computed with u and v")
}

/// Null space of `a` by SVD with a relative rank threshold.
///
/// Returns the null vectors (columns), the singular values in descending
/// order, and the gap between the smallest kept and largest discarded value.
pub struct NullSpace {
    pub basis: CMatrix,
    pub singular_values: Vec<f64>,
    pub gap: f64,
    pub rank: usize,
}

pub fn null_space(a: &CMatrix, rel_threshold: f64) -> NullSpace {
    let (rows, cols) = a.shape();
    // Pad to square so the full right-singular basis is available.
    let padded = if rows < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|&&s| s > smax * rel_threshold && s > 0.0).count();
    let gap = if rank == 0 || rank == sv.len() {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank].max(f64::MIN_POSITIVE)
    };
    let nullity = cols - rank;
    let mut basis = CMatrix::zeros(cols, nullity);
    for (k, &idx) in order[rank..].iter().enumerate() {
        for c in 0..cols {
            basis[(c, k)] = v_t[(idx, c)].conj();
        }
    }
    NullSpace {
        basis,
        singular_values: sv,
        gap,
        rank,
    }
}

/// Nonnegative least squares (Lawson–Hanson active set).
///
/// Returns the solution and the Euclidean residual `‖a x − b‖`.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let n = a.ncols();
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let tol = 1e-12 * a.norm().max(1.0) * b.norm().max(1.0);
    let max_outer = 3 * n + 10;

    for _ in 0..max_outer {
        let w = a.transpose() * (b - a * &x);
        let candidate = (0..n)
            .filter(|&j| !passive[j])
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(j) = candidate else { break };
        if w[j] <= tol {
            break;
        }
        passive[j] = true;

        for _ in 0..max_outer {
            let idx: Vec<usize> = (0..n).filter(|&k| passive[k]).collect();
            let sub = a.select_columns(&idx);
            let z_sub = lstsq_real(&sub, b, 1e-14);
            if z_sub.iter().all(|&v| v > 0.0) {
                x.fill(0.0);
                for (k, &i) in idx.iter().enumerate() {
                    x[i] = z_sub[k];
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &i) in idx.iter().enumerate() {
                if z_sub[k] <= 0.0 {
                    let denom = x[i] - z_sub[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[i] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &i) in idx.iter().enumerate() {
                x[i] += alpha * (z_sub[k] - x[i]);
                if x[i] <= 1e-15 {
                    x[i] = 0.0;
                    passive[i] = false;
                }
            }
        }
    }
    let residual = (a * &x - b).norm();
    (x, residual)
}

/// Gauss–Newton fit of `|D c|² = targets` over complex `c`, started at
/// `start`, with SVD-truncated steps and backtracking. Returns the
/// coefficients and the final `‖|Dc|² − targets‖₂`.
pub fn fit_modulus(design: &CMatrix, targets: &[f64], start: &[C64], max_iter: usize) -> (Vec<C64>, f64) {
    let rows = design.nrows();
    let n = design.ncols();
    let residual = |c: &[C64]| -> (CVector, DVector<f64>) {
        let v = design * CVector::from_column_slice(c);
        let r = DVector::from_iterator(rows, v.iter().zip(targets).map(|(x, t)| t - x.norm_sqr()));
        (v, r)
    };
    let mut coef = start.to_vec();
    let (mut v, mut r) = residual(&coef);
    let mut cost = r.norm_squared();
    let floor = (1e-14 * targets.iter().map(|t| t * t).sum::<f64>().sqrt()).powi(2);
    for _ in 0..max_iter {
        if cost <= floor {
            break;
        }
        let mut jac = DMatrix::<f64>::zeros(rows, 2 * n);
        for j in 0..rows {
            let vc = v[j].conj() * 2.0;
            for k in 0..n {
                let w = vc * design[(j, k)];
                jac[(j, k)] = w.re;
                jac[(j, n + k)] = -w.im;
            }
        }
        let step = lstsq_real(&jac, &r, 1e-12);
        let mut t = 1.0;
        let mut improved = None;
        for _ in 0..8 {
            let trial: Vec<C64> = (0..n)
                .map(|k| coef[k] + C64::new(step[k], step[n + k]) * t)
                .collect();
            let (tv, tr) = residual(&trial);
            let tcost = tr.norm_squared();
            if tcost < cost {
                improved = Some((trial, tv, tr, tcost));
                break;
            }
            t *= 0.5;
        }
        let Some((trial, tv, tr, tcost)) = improved else { break };
        let gain = (cost - tcost) / cost;
        coef = trial;
        v = tv;
        r = tr;
        cost = tcost;
        if gain < 1e-6 {
            break;
        }
    }
    (coef, cost.sqrt())
}
