//! Carleson embeddings `J: K_θ → L²(μ)` for nonnegative measures on the
//! closed disk, and the constants built from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::clark::clark_union_partition;
use crate::error::{Error, Result};
use crate::factor::factorize4;
use crate::measure::BoundaryMeasure;
use crate::modelspace::{KFun, ModelSpace};
use crate::{linalg, random, CMatrix, CVector, C64};

/// A point of the measure together with its weight and its row of `J`.
struct Row {
    point: C64,
    weight: f64,
}

fn measure_rows(space: &ModelSpace, mu: &BoundaryMeasure) -> Result<Vec<Row>> {
    mu.check_grid(space.grid_size())?;
    mu.check_closed_disk()?;
    let scale = mu.total_variation().max(f64::MIN_POSITIVE);
    let admissible = |w: C64| w.re >= -1e-14 * scale && w.im.abs() <= 1e-12 * scale;
    let mut rows = Vec::new();
    for atom in &mu.atoms {
        if !admissible(atom.weight) {
            return Err(Error::InvalidArgument(format!(
                "embedding needs a nonnegative measure; atom weight {}",
                atom.weight
            )));
        }
        if atom.weight.re > 0.0 {
            rows.push(Row {
                point: atom.point(),
                weight: atom.weight.re,
            });
        }
    }
    if let Some(d) = &mu.density {
        let n = d.len() as f64;
        for (v, &t) in d.iter().zip(space.nodes()) {
            if !admissible(*v) {
                return Err(Error::InvalidArgument(format!(
                    "embedding needs a nonnegative density; sample {v}"
                )));
            }
            if v.re > 0.0 {
                rows.push(Row {
                    point: t,
                    weight: v.re / n,
                });
            }
        }
    }
    Ok(rows)
}

/// `J` as a matrix: one row `√c · (b_0(p), …, b_{n−1}(p))` per atom `c·δ_p`
/// and per positive density sample. `J*J` is the Gram matrix of the embedding.
pub fn embedding_matrix(space: &ModelSpace, mu: &BoundaryMeasure) -> Result<CMatrix> {
    let rows = measure_rows(space, mu)?;
    Ok(rows_matrix(space, &rows))
}

fn rows_matrix(space: &ModelSpace, rows: &[Row]) -> CMatrix {
    let mut j = CMatrix::zeros(rows.len(), space.degree());
    for (r, row) in rows.iter().enumerate() {
        let b = space.basis_at(row.point) * C64::new(row.weight.sqrt(), 0.0);
        j.row_mut(r).copy_from(&b.transpose());
    }
    j
}

/// Best constant of `K_θ → L²(μ)`: the largest singular value of `J`.
pub fn embedding_norm(space: &ModelSpace, mu: &BoundaryMeasure) -> Result<f64> {
    Ok(linalg::spectral_norm(&embedding_matrix(space, mu)?))
}

/// Rayleigh-quotient cross-check of [`embedding_norm`].
#[derive(Clone, Debug, Serialize)]
pub struct RayleighCheck {
    pub sigma_max: f64,
    /// Best `‖Jv‖` over the random unit vectors.
    pub random_best: f64,
    /// `‖Jv‖` after power iteration on `J*J` started from the best random vector.
    pub refined: f64,
}

impl RayleighCheck {
    /// No quotient exceeds `σ_max`, and the refined one comes within `rel`.
    pub fn passes(&self, rel: f64) -> bool {
        let cap = self.sigma_max * (1.0 + 1e-10) + 1e-300;
        self.random_best <= cap && self.refined <= cap && self.refined >= (1.0 - rel) * self.sigma_max
    }
}

pub fn embedding_norm_rayleigh(
    space: &ModelSpace,
    mu: &BoundaryMeasure,
    trials: usize,
    seed: u64,
) -> Result<RayleighCheck> {
    let j = embedding_matrix(space, mu)?;
    let sigma_max = linalg::spectral_norm(&j);
    let gram = j.adjoint() * &j;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.degree();
    let mut best = (0.0, CVector::zeros(n));
    for _ in 0..trials {
        let v = CVector::from_fn(n, |_, _| random::normal_c64(&mut rng)).normalize();
        let q = (&j * &v).norm();
        if q > best.0 {
            best = (q, v);
        }
    }
    let mut v = best.1.clone();
    for _ in 0..200 {
        let w = &gram * &v;
        if w.norm() == 0.0 {
            break;
        }
        v = w.normalize();
    }
    Ok(RayleighCheck {
        sigma_max,
        random_best: best.0,
        refined: (&j * &v).norm(),
    })
}

fn theta_vanishes_at_origin(space: &ModelSpace) -> Result<()> {
    let t0 = space.theta().value(C64::new(0.0, 0.0)).norm();
    if t0 > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "this check assumes θ(0) = 0, got |θ(0)| = {t0:.3e}; apply the Crofoot transform first"
        )));
    }
    Ok(())
}

/// Frobenius norm of `M_z J − J A_z − (·, z̄θ)θ`, assembled over the rows of `J`.
pub fn commutator_check(space: &ModelSpace, mu: &BoundaryMeasure) -> Result<f64> {
    theta_vanishes_at_origin(space)?;
    let rows = measure_rows(space, mu)?;
    for row in &rows {
        if (row.point.norm() - 1.0).abs() <= 1e-12 {
            let dev = (space.theta().value(row.point).norm() - 1.0).abs();
            if dev > 1e-10 {
                return Err(Error::tolerance("|θ| − 1 at a boundary atom", dev, 1e-10));
            }
        }
    }
    let j = rows_matrix(space, &rows);
    // z̄θ = k̃₀ when θ(0) = 0.
    let q = space.conj_kernel(C64::new(0.0, 0.0))?.vector();
    let mut lhs = j.clone();
    for (r, row) in rows.iter().enumerate() {
        let p = row.point;
        let mut line = lhs.row_mut(r);
        line *= p;
    }
    lhs -= &j * space.shift_matrix();
    let mut rhs = CMatrix::zeros(rows.len(), space.degree());
    for (r, row) in rows.iter().enumerate() {
        let s = row.weight.sqrt() * space.theta().value(row.point);
        rhs.row_mut(r).copy_from(&(q.adjoint() * s));
    }
    Ok((lhs - rhs).norm())
}

#[derive(Clone, Debug, Serialize)]
pub struct AbelRow {
    pub r: f64,
    /// `‖g_r − Jg‖_{L²(μ)}`.
    pub error: f64,
    /// `‖g_r‖_{L²(μ)}`.
    pub norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AbelTable {
    pub rows: Vec<AbelRow>,
    /// `‖Jg‖_{L²(μ)}`.
    pub jg_norm: f64,
    /// `‖J‖`.
    pub j_norm: f64,
    /// `‖g‖₂`.
    pub g_norm: f64,
}

impl AbelTable {
    /// `‖g_r‖ ≤ 2‖Jg‖` at every `r`, with relative slack `tol`.
    pub fn factor_two_holds(&self, tol: f64) -> bool {
        self.rows
            .iter()
            .all(|row| row.norm <= 2.0 * self.jg_norm * (1.0 + tol) + tol)
    }

    /// `‖g_r‖ ≤ ‖Jg‖ + ‖J‖·‖g‖₂` at every `r`: the bound that holds for any
    /// bounded embedding. It reduces to the factor-two bound when `J` is isometric.
    pub fn general_bound_holds(&self, tol: f64) -> bool {
        let bound = self.jg_norm + self.j_norm * self.g_norm;
        self.rows.iter().all(|row| row.norm <= bound * (1.0 + tol) + tol)
    }

    /// Errors never increase as `r` grows, up to absolute slack `tol`.
    pub fn monotone(&self, tol: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].error <= w[0].error + tol)
    }

    pub fn final_error(&self) -> f64 {
        self.rows.last().map(|r| r.error).unwrap_or(0.0)
    }
}

/// The Abel means `g_r(z) = g(rz)` compared with `Jg` in `L²(μ)`.
pub fn abel_means_check(space: &ModelSpace, mu: &BoundaryMeasure, g: &KFun, r_list: &[f64]) -> Result<AbelTable> {
    theta_vanishes_at_origin(space)?;
    space.check(g)?;
    if r_list.iter().any(|&r| !(0.0..1.0).contains(&r)) {
        return Err(Error::InvalidArgument("radii must lie in [0, 1)".into()));
    }
    let rows = measure_rows(space, mu)?;
    let j = rows_matrix(space, &rows);
    let jg = &j * g.vector();
    let jg_norm = jg.norm();
    let mut table = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let mut err = 0.0;
        let mut norm = 0.0;
        for (k, row) in rows.iter().enumerate() {
            let v = space.eval(g, row.point * r) * row.weight.sqrt();
            err += (v - jg[k]).norm_sqr();
            norm += v.norm_sqr();
        }
        table.push(AbelRow {
            r,
            error: err.sqrt(),
            norm: norm.sqrt(),
        });
    }
    Ok(AbelTable {
        rows: table,
        jg_norm,
        j_norm: linalg::spectral_norm(&j),
        g_norm: g.norm(),
    })
}

/// One row of the constants dashboard.
#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub theta_id: String,
    pub measure_id: String,
    pub n: usize,
    /// Best constant of `K_θ → L²(μ)`.
    pub c2_theta: f64,
    /// Best constant of `K_{θ²} → L²(μ)`.
    pub c2_theta2: f64,
    /// Constants of the two blocks of `K_{θ²} = K_θ ⊕ θK_θ`.
    pub c2_blocks: [f64; 2],
    /// `sup ∫|x||y| dμ` over sampled unit pairs in `K_θ`.
    pub c1_lower: f64,
    /// `max Σ|f(s_n)|/|θ'(u_n)| ÷ ‖f‖₁` over sampled products `f = xy`.
    pub pp_ratio: f64,
    /// `K_emp · c2²`, with `K_emp` the largest factorization constant ratio seen.
    pub c1_upper: f64,
    pub k_emp: f64,
}

impl EmbeddingReport {
    pub const CSV_HEADER: &'static str = "theta_id,measure_id,n,c2_theta,c2_theta2,c1_lower,pp_ratio,c1_upper";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            self.theta_id,
            self.measure_id,
            self.n,
            self.c2_theta,
            self.c2_theta2,
            self.c1_lower,
            self.pp_ratio,
            self.c1_upper
        )
    }
}

#[derive(Clone, Debug)]
pub struct DashboardOptions {
    pub seed: u64,
    pub pairs: usize,
    pub pp_trials: usize,
    pub factor_trials: usize,
}

impl Default for DashboardOptions {
    fn default() -> Self {
        DashboardOptions {
            seed: 0,
            pairs: 500,
            pp_trials: 100,
            factor_trials: 3,
        }
    }
}

/// Per-measure constants: `C₂(θ)`, `C₂(θ²)`, a lower bound for the `L¹`
/// constant on products, the Plancherel–Pólya ratio on Clark arcs, and an
/// empirical factorization-based upper estimate.
pub fn constants_dashboard(
    space: &ModelSpace,
    measures: &[BoundaryMeasure],
    opts: &DashboardOptions,
) -> Result<Vec<EmbeddingReport>> {
    let theta = space.theta();
    let n = space.degree();
    let space2 = ModelSpace::new(theta.squared()?, space.grid_size())?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    // Measure-independent pieces: unit pairs, Plancherel–Pólya ratio, K_emp.
    let pairs: Vec<(KFun, KFun)> = (0..opts.pairs)
        .map(|_| (random::unit_kfun(&mut rng, space), random::unit_kfun(&mut rng, space)))
        .collect();
    let pp_ratio = plancherel_polya_ratio(space, &mut rng, opts.pp_trials)?;
    let mut k_emp: f64 = 0.0;
    for _ in 0..opts.factor_trials {
        let x = random::kfun(&mut rng, space);
        let y = random::kfun(&mut rng, space);
        let f = product_samples(space, &x, &y);
        let res = factorize4(space, &f)?;
        k_emp = k_emp.max(res.constant / ModelSpace::l1_norm(&f));
    }

    let mut out = Vec::with_capacity(measures.len());
    for mu in measures {
        let rows = measure_rows(space, mu)?;
        let j = rows_matrix(space, &rows);
        let c2_theta = linalg::spectral_norm(&j);
        let j2 = embedding_matrix(&space2, mu)?;
        let c2_theta2 = linalg::spectral_norm(&j2);
        let c2_blocks = [
            linalg::spectral_norm(&j2.columns(0, n).into_owned()),
            linalg::spectral_norm(&j2.columns(n, n).into_owned()),
        ];
        // ∫|x||y|dμ = Σ_rows |(Jx)_r| |(Jy)_r|.
        let mut c1_lower: f64 = 0.0;
        for (x, y) in &pairs {
            let jx = &j * x.vector();
            let jy = &j * y.vector();
            c1_lower = c1_lower.max(jx.iter().zip(jy.iter()).map(|(a, b)| a.norm() * b.norm()).sum());
        }
        for atom in &mu.atoms {
            let k = space.repro_kernel(atom.point())?;
            let kv = k.vector() / C64::new(k.norm(), 0.0);
            let jk = &j * kv;
            c1_lower = c1_lower.max(jk.iter().map(|a| a.norm_sqr()).sum());
        }
        out.push(EmbeddingReport {
            theta_id: space.theta_id().to_string(),
            measure_id: mu.measure_id(),
            n,
            c2_theta,
            c2_theta2,
            c2_blocks,
            c1_lower,
            pp_ratio,
            c1_upper: k_emp * c2_theta * c2_theta,
            k_emp,
        });
    }
    Ok(out)
}

pub(crate) fn product_samples(space: &ModelSpace, x: &KFun, y: &KFun) -> Vec<C64> {
    let xs = space.samples(x);
    let ys = space.samples(y);
    xs.iter().zip(&ys).map(|(a, b)| a * b).collect()
}

/// `max_f Σ_n |f(s_n)|/|θ'(u_n)| ÷ ‖f‖₁` over random products `f = xy`, with
/// `s_n = u_n` the midpoints of the arcs of the `σ₁ ∪ σ₋₁` partition.
pub fn plancherel_polya_ratio<R: Rng + ?Sized>(space: &ModelSpace, rng: &mut R, trials: usize) -> Result<f64> {
    let part = clark_union_partition(space.theta())?;
    let mids: Vec<(CVector, f64)> = (0..part.points.len())
        .map(|k| {
            let (a, b) = part.arc(k);
            let t = C64::from_polar(1.0, 0.5 * (a + b));
            (space.basis_at(t), space.theta().boundary_deriv_mod(t))
        })
        .collect();
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let x = random::kfun(rng, space);
        let y = random::kfun(rng, space);
        let f = product_samples(space, &x, &y);
        let sum: f64 = mids
            .iter()
            .map(|(b, d)| {
                let xv: C64 = b.iter().zip(&x.coef).map(|(u, c)| u * c).sum();
                let yv: C64 = b.iter().zip(&y.coef).map(|(u, c)| u * c).sum();
                (xv * yv).norm() / d
            })
            .sum();
        best = best.max(sum / ModelSpace::l1_norm(&f));
    }
    Ok(best)
}
