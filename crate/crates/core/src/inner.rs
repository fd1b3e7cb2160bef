//! Finite Blaschke products and their boundary geometry.

use std::collections::VecDeque;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::{cplx, poly, C64};

pub const MAX_DEGREE: usize = 256;
/// Zeros must satisfy `|a| ≤ 1 − ZERO_MARGIN`.
pub const ZERO_MARGIN: f64 = 1e-12;
const FRONT_TOL: f64 = 1e-14;
/// Points with `|z| ≤ 1 + DISK_SLACK` count as lying in the closed disk.
const DISK_SLACK: f64 = 1e-12;

/// A finite Blaschke product `front · Π (z − a)/(1 − āz)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InnerRepr", into = "InnerRepr")]
pub struct InnerFunction {
    zeros: Vec<C64>,
    front: C64,
}

#[derive(Serialize, Deserialize)]
struct InnerRepr {
    #[serde(with = "cplx::pairs")]
    zeros: Vec<C64>,
    #[serde(with = "cplx::pair")]
    front: C64,
}

impl TryFrom<InnerRepr> for InnerFunction {
    type Error = Error;
    fn try_from(r: InnerRepr) -> Result<Self> {
        InnerFunction::new(r.zeros, r.front)
    }
}

impl From<InnerFunction> for InnerRepr {
    fn from(t: InnerFunction) -> Self {
        InnerRepr {
            zeros: t.zeros,
            front: t.front,
        }
    }
}

impl InnerFunction {
    /// Validated constructor (`make_blaschke`).
    pub fn new(zeros: Vec<C64>, front: C64) -> Result<Self> {
        if zeros.len() > MAX_DEGREE {
            return Err(Error::DegreeTooLarge {
                degree: zeros.len(),
                cap: MAX_DEGREE,
            });
        }
        if let Some(a) = zeros.iter().find(|a| !(a.norm() <= 1.0 - ZERO_MARGIN)) {
            return Err(Error::ZeroOutsideDisk { modulus: a.norm() });
        }
        if !((front.norm() - 1.0).abs() <= FRONT_TOL) {
            return Err(Error::NonUnimodularFront {
                modulus: front.norm(),
            });
        }
        Ok(InnerFunction { zeros, front })
    }

    /// `zⁿ`.
    pub fn monomial(n: usize) -> Self {
        InnerFunction::new(vec![C64::new(0.0, 0.0); n], C64::new(1.0, 0.0))
            .expect("monomials are valid for n ≤ 256")
    }

    pub fn zeros(&self) -> &[C64] {
        &self.zeros
    }

    pub fn front(&self) -> C64 {
        self.front
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// θ², with the zero list repeated.
    pub fn squared(&self) -> Result<InnerFunction> {
        let mut zeros = self.zeros.clone();
        zeros.extend_from_slice(&self.zeros);
        InnerFunction::new(zeros, self.front * self.front)
    }

    /// Stable content hash used to tag derived objects.
    pub fn theta_id(&self) -> String {
        let mut h = Sha256::new();
        for z in self.zeros.iter().chain(std::iter::once(&self.front)) {
            h.update(z.re.to_le_bytes());
            h.update(z.im.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }

    /// θ(z) for `|z| ≤ 1`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        if z.norm() > 1.0 + DISK_SLACK {
            return Err(Error::OutsideDisk { modulus: z.norm() });
        }
        Ok(self.value(z))
    }

    /// Unchecked evaluation; the product is analytic on `|z| < 1/max|a|`.
    pub(crate) fn value(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.front, |acc, &a| acc * mobius(a, z))
    }

    /// θ(e^{ix}).
    pub fn at_angle(&self, x: f64) -> C64 {
        self.value(C64::from_polar(1.0, x))
    }

    /// θ'(z), by logarithmic differentiation of the product.
    pub fn derivative(&self, z: C64) -> C64 {
        // d/dz (z−a)/(1−āz) = (1−|a|²)/(1−āz)²
        let mut total = C64::new(0.0, 0.0);
        for (k, &a) in self.zeros.iter().enumerate() {
            let d = (1.0 - a.norm_sqr()) / ((C64::new(1.0, 0.0) - a.conj() * z).powi(2));
            let rest = self
                .zeros
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(self.front, |acc, (_, &b)| acc * mobius(b, z));
            total += d * rest;
        }
        total
    }

    /// `|θ'(t)| = Σ (1−|a|²)/|t−a|²` for unimodular `t`.
    pub fn boundary_deriv_mod(&self, t: C64) -> f64 {
        self.zeros
            .iter()
            .map(|&a| (1.0 - a.norm_sqr()) / (t - a).norm_sqr())
            .sum()
    }

    /// `(θ(z) − θ(λ))/(z − λ)`, evaluated by telescoping the product so no
    /// cancellation occurs as `z → λ`.
    pub fn difference_quotient(&self, lambda: C64, z: C64) -> C64 {
        let n = self.zeros.len();
        let mut left = vec![C64::new(1.0, 0.0); n + 1];
        for k in 0..n {
            left[k + 1] = left[k] * mobius(self.zeros[k], lambda);
        }
        let mut right = C64::new(1.0, 0.0);
        let mut total = C64::new(0.0, 0.0);
        for k in (0..n).rev() {
            let a = self.zeros[k];
            let one = C64::new(1.0, 0.0);
            let dq = (1.0 - a.norm_sqr()) / ((one - a.conj() * z) * (one - a.conj() * lambda));
            total += left[k] * dq * right;
            right *= mobius(a, z);
        }
        self.front * total
    }

    /// The continuous increasing branch ψ with θ(e^{ix}) = front·e^{iψ(x)}.
    pub fn arg_branch(&self) -> Result<ArgBranch> {
        if self.zeros.is_empty() {
            return Err(Error::InvalidArgument(
                "argument branch needs degree ≥ 1".into(),
            ));
        }
        let mut branch = ArgBranch {
            zeros: self.zeros.clone(),
            offset: 0.0,
        };
        let anchor = (self.value(C64::new(1.0, 0.0)) / self.front).arg();
        branch.offset = anchor - branch.raw(0.0);
        // Cross-check the closed form against quadrature of |θ'| over one period.
        let by_quad = branch.increment_by_quadrature(0.0, TAU)?;
        let want = TAU * self.degree() as f64;
        if (by_quad - want).abs() > 1e-9 * want.max(1.0) {
            return Err(Error::tolerance("winding by quadrature", (by_quad - want).abs(), 1e-9));
        }
        Ok(branch)
    }

    /// Frostman shift `Θ = (θ − w)/(1 − w̄θ)`, returned as a Blaschke product.
    pub fn frostman_shift(&self, w: C64) -> Result<InnerFunction> {
        if w.norm() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "Frostman parameter must satisfy |w| < 1, got {}",
                w.norm()
            )));
        }
        if w.norm() == 0.0 {
            return Ok(self.clone());
        }
        let n = self.degree();
        let front = self.front;
        let zeros = &self.zeros;
        // Numerator of θ − w: front·P(z) − w·Q(z), P = Π(z−a), Q = Π(1−āz).
        let numerator = |z: C64| {
            let one = C64::new(1.0, 0.0);
            let (mut p, mut dp) = (one, C64::new(0.0, 0.0));
            let (mut q, mut dq) = (one, C64::new(0.0, 0.0));
            for &a in zeros {
                dp = dp * (z - a) + p;
                p *= z - a;
                dq = dq * (one - a.conj() * z) - q * a.conj();
                q *= one - a.conj() * z;
            }
            (front * p - w * q, front * dp - w * dq)
        };
        let roots = poly::aberth(n, 0.5, numerator)?;
        let mut new_zeros = Vec::with_capacity(n);
        for r in roots {
            let residual = (self.value(r) - w).norm();
            if residual > 1e-8 {
                return Err(Error::tolerance("frostman root residual", residual, 1e-8));
            }
            // Roots of θ = w lie in the open disk; clamp rounding excursions.
            let r = if r.norm() > 1.0 - ZERO_MARGIN {
                r * ((1.0 - 2.0 * ZERO_MARGIN) / r.norm())
            } else {
                r
            };
            new_zeros.push(r);
        }
        // Fix the unimodular constant by matching at z = 1.
        let one = C64::new(1.0, 0.0);
        let th = self.value(one);
        let target = (th - w) / (one - w.conj() * th);
        let bare = new_zeros.iter().fold(one, |acc, &a| acc * mobius(a, one));
        let new_front = target / bare;
        let new_front = new_front / new_front.norm();
        InnerFunction::new(new_zeros, new_front)
    }

    /// Number of 4-connected components of `{|θ| < ε}` rasterized on a
    /// `grid_res × grid_res` lattice over the disk. Diagnostic only.
    pub fn sublevel_components(&self, eps: f64, grid_res: usize) -> Result<usize> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidArgument(format!("ε must lie in (0,1), got {eps}")));
        }
        if grid_res == 0 {
            return Err(Error::InvalidArgument("grid_res must be positive".into()));
        }
        let h = 2.0 / grid_res as f64;
        let coord = |i: usize| -1.0 + (i as f64 + 0.5) * h;
        let mut mask = vec![false; grid_res * grid_res];
        for i in 0..grid_res {
            for j in 0..grid_res {
                let z = C64::new(coord(i), coord(j));
                if z.norm() < 1.0 && self.value(z).norm() < eps {
                    mask[i * grid_res + j] = true;
                }
            }
        }
        let mut seen = vec![false; mask.len()];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..mask.len() {
            if !mask[start] || seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(cell) = queue.pop_front() {
                let (i, j) = (cell / grid_res, cell % grid_res);
                let mut visit = |ii: usize, jj: usize| {
                    let c = ii * grid_res + jj;
                    if mask[c] && !seen[c] {
                        seen[c] = true;
                        queue.push_back(c);
                    }
                };
                if i > 0 {
                    visit(i - 1, j);
                }
                if i + 1 < grid_res {
                    visit(i + 1, j);
                }
                if j > 0 {
                    visit(i, j - 1);
                }
                if j + 1 < grid_res {
                    visit(i, j + 1);
                }
            }
        }
        Ok(components)
    }
}

#[inline]
pub(crate) fn mobius(a: C64, z: C64) -> C64 {
    (z - a) / (C64::new(1.0, 0.0) - a.conj() * z)
}

/// Continuous increasing argument of a Blaschke product on the circle,
/// normalized by θ(e^{ix}) = front·e^{iψ(x)} and anchored at x = 0.
///
/// Each factor contributes `x + 2·arg(1 − a e^{−ix})`, and `Re(1 − a e^{−ix})`
/// is positive, so the factor arguments are continuous without unwrapping.
#[derive(Clone, Debug)]
pub struct ArgBranch {
    zeros: Vec<C64>,
    offset: f64,
}

impl ArgBranch {
    fn raw(&self, x: f64) -> f64 {
        let e = C64::from_polar(1.0, -x);
        self.zeros
            .iter()
            .map(|&a| {
                let w = C64::new(1.0, 0.0) - a * e;
                x + 2.0 * w.im.atan2(w.re)
            })
            .sum()
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    pub fn psi(&self, x: f64) -> f64 {
        self.raw(x) + self.offset
    }

    /// ψ'(x) = |θ'(e^{ix})|.
    pub fn derivative(&self, x: f64) -> f64 {
        let t = C64::from_polar(1.0, x);
        self.zeros
            .iter()
            .map(|&a| (1.0 - a.norm_sqr()) / (t - a).norm_sqr())
            .sum()
    }

    /// ∫_{x0}^{x1} |θ'(e^{ix})| dx by adaptive Simpson at absolute tolerance 1e−10.
    pub fn increment_by_quadrature(&self, x0: f64, x1: f64) -> Result<f64> {
        let f = |x: f64| self.derivative(x);
        let (a, b) = (x0, x1);
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        adaptive_simpson(&f, a, b, fa, fm, fb, whole, 1e-10, 60)
            .ok_or_else(|| Error::NoConvergence {
                what: "argument quadrature".into(),
            })
    }

    /// The unique `x ∈ [0, 2π]` with ψ(x) = target, by bisection.
    pub fn solve(&self, target: f64) -> Result<f64> {
        let (mut lo, mut hi) = (0.0, TAU);
        let (p_lo, p_hi) = (self.psi(lo), self.psi(hi));
        if target < p_lo - 1e-12 || target > p_hi + 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "target {target} outside branch range [{p_lo}, {p_hi}]"
            )));
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if hi - lo > 1e-12 {
            return Err(Error::NoConvergence {
                what: "argument bisection".into(),
            });
        }
        Ok(0.5 * (lo + hi))
    }
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_evaluates_as_power() {
        let th = InnerFunction::new(vec![c(0.0, 0.0); 3], c(1.0, 0.0)).unwrap();
        assert_eq!(th.degree(), 3);
        assert!((th.eval(c(0.5, 0.0)).unwrap() - 0.125).norm() < 1e-15);
    }

    #[test]
    fn single_factor_values() {
        let th = InnerFunction::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        assert!(th.eval(c(0.5, 0.0)).unwrap().norm() < 1e-15);
        assert!((th.eval(c(1.0, 0.0)).unwrap() - 1.0).norm() < 1e-15);
        assert!((th.eval(c(0.0, 1.0)).unwrap().norm() - 1.0).abs() < 1e-15);
        // (0 − 0.9)/(1 − 0) by hand.
        let th = InnerFunction::new(vec![c(0.9, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((th.eval(c(0.0, 0.0)).unwrap() - c(-0.9, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn value_at_origin_is_product_of_negated_zeros() {
        let a = [c(0.3, 0.4), c(-0.2, 0.0)];
        let th = InnerFunction::new(a.to_vec(), c(1.0, 0.0)).unwrap();
        let want = c(-0.3, -0.4) * c(0.2, 0.0);
        assert!((th.eval(c(0.0, 0.0)).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            InnerFunction::new(vec![c(1.0, 0.0)], c(1.0, 0.0)),
            Err(Error::ZeroOutsideDisk { .. })
        ));
        assert!(matches!(
            InnerFunction::new(vec![c(1.0 - 1e-13, 0.0)], c(1.0, 0.0)),
            Err(Error::ZeroOutsideDisk { .. })
        ));
        assert!(matches!(
            InnerFunction::new(vec![], c(1.1, 0.0)),
            Err(Error::NonUnimodularFront { .. })
        ));
        let th = InnerFunction::monomial(2);
        assert!(matches!(th.eval(c(1.5, 0.0)), Err(Error::OutsideDisk { .. })));
        assert!(InnerFunction::new(vec![c(0.0, 0.0); 257], c(1.0, 0.0)).is_err());
    }

    #[test]
    fn boundary_derivative_modulus() {
        let th = InnerFunction::monomial(5);
        assert!((th.boundary_deriv_mod(C64::from_polar(1.0, 0.7)) - 5.0).abs() < 1e-14);
        let th = InnerFunction::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        assert!((th.boundary_deriv_mod(c(1.0, 0.0)) - 3.0).abs() < 1e-14);
        assert!((th.boundary_deriv_mod(c(-1.0, 0.0)) - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn derivative_modulus_matches_finite_differences_of_branch() {
        let th = InnerFunction::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let psi = th.arg_branch().unwrap();
        let h = 1e-5;
        for (x, want) in [(0.0, 3.0), (std::f64::consts::PI, 1.0 / 3.0)] {
            let fd = (psi.psi(x + h) - psi.psi(x - h)) / (2.0 * h);
            assert!((fd - want).abs() < 1e-6 * want);
        }
    }

    #[test]
    fn branch_of_square_is_linear() {
        let th = InnerFunction::monomial(2);
        let psi = th.arg_branch().unwrap();
        for x in [0.0, 0.3, 2.0, 5.5] {
            assert!((psi.psi(x) - 2.0 * x).abs() < 1e-13);
        }
    }

    #[test]
    fn branch_half_period_two_ways() {
        let th = InnerFunction::new(vec![c(0.5, 0.0)], c(1.0, 0.0)).unwrap();
        let psi = th.arg_branch().unwrap();
        let closed = psi.psi(std::f64::consts::PI) - psi.psi(0.0);
        let quad = psi.increment_by_quadrature(0.0, std::f64::consts::PI).unwrap();
        // Unwrapped argument of direct evaluation along a fine path.
        let steps = 20000;
        let mut unwrapped = 0.0;
        let mut prev = th.at_angle(0.0);
        for k in 1..=steps {
            let cur = th.at_angle(std::f64::consts::PI * k as f64 / steps as f64);
            unwrapped += (cur / prev).arg();
            prev = cur;
        }
        assert!((closed - quad).abs() < 1e-9);
        assert!((closed - unwrapped).abs() < 1e-9);
    }

    #[test]
    fn branch_with_front_is_anchored() {
        let th = InnerFunction::new(vec![c(0.3, -0.2), c(-0.6, 0.1)], C64::from_polar(1.0, 1.1)).unwrap();
        let psi = th.arg_branch().unwrap();
        for x in [0.0, 1.0, 4.0] {
            let want = th.at_angle(x) / th.front();
            assert!((C64::from_polar(1.0, psi.psi(x)) - want).norm() < 1e-12);
        }
        assert!((psi.psi(TAU) - psi.psi(0.0) - 2.0 * TAU).abs() < 1e-10);
    }

    #[test]
    fn frostman_examples() {
        let th = InnerFunction::monomial(1);
        let s = th.frostman_shift(c(0.5, 0.0)).unwrap();
        assert_eq!(s.degree(), 1);
        assert!((s.zeros()[0] - 0.5).norm() < 1e-12);

        let th = InnerFunction::monomial(2);
        let s = th.frostman_shift(c(0.25, 0.0)).unwrap();
        let mut z: Vec<f64> = s.zeros().iter().map(|a| a.re).collect();
        z.sort_by(f64::total_cmp);
        assert!((z[0] + 0.5).abs() < 1e-12 && (z[1] - 0.5).abs() < 1e-12);
        for a in s.zeros() {
            assert!(a.im.abs() < 1e-12);
        }

        let same = th.frostman_shift(c(0.0, 0.0)).unwrap();
        assert_eq!(same, th);
    }

    #[test]
    fn frostman_matches_direct_formula_on_boundary() {
        let th = InnerFunction::new(vec![c(0.2, 0.5), c(-0.7, 0.1), c(0.0, -0.4)], C64::from_polar(1.0, 0.3)).unwrap();
        let w = th.eval(c(0.0, 0.0)).unwrap();
        let s = th.frostman_shift(w).unwrap();
        assert!(s.eval(c(0.0, 0.0)).unwrap().norm() < 1e-12);
        for k in 0..64 {
            let x = TAU * k as f64 / 64.0;
            let t = th.at_angle(x);
            let direct = (t - w) / (C64::new(1.0, 0.0) - w.conj() * t);
            assert!((s.at_angle(x) - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn difference_quotient_matches_naive_away_from_diagonal() {
        let th = InnerFunction::new(vec![c(0.2, 0.5), c(-0.7, 0.1)], c(0.0, 1.0)).unwrap();
        let lam = c(0.3, -0.1);
        let z = c(-0.4, 0.6);
        let naive = (th.value(z) - th.value(lam)) / (z - lam);
        assert!((th.difference_quotient(lam, z) - naive).norm() < 1e-13);
        assert!((th.difference_quotient(lam, lam) - th.derivative(lam)).norm() < 1e-13);
    }

    #[test]
    fn sublevel_components_examples() {
        assert_eq!(InnerFunction::monomial(1).sublevel_components(0.5, 200).unwrap(), 1);
        assert_eq!(InnerFunction::monomial(2).sublevel_components(0.5, 200).unwrap(), 1);
        let th = InnerFunction::new(vec![c(0.9, 0.0), c(-0.9, 0.0)], c(1.0, 0.0)).unwrap();
        assert_eq!(th.sublevel_components(0.01, 2048).unwrap(), 2);
        assert!(th.sublevel_components(1.0, 10).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let th = InnerFunction::new(vec![c(0.1, -0.2)], c(0.0, 1.0)).unwrap();
        let s = serde_json::to_string(&th).unwrap();
        assert_eq!(s, r#"{"zeros":[[0.1,-0.2]],"front":[0.0,1.0]}"#);
        let back: InnerFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, th);
        assert!(serde_json::from_str::<InnerFunction>(r#"{"zeros":[[1.0,0.0]],"front":[1.0,0.0]}"#).is_err());
    }
}
