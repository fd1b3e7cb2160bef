//! One function per subcommand. Each returns the document to write and a
//! one-line summary.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use ttolab::cplx::to_pair;
use ttolab::{
    clark_isometry_check, clark_measure, clark_union_partition, commutator_check, constants_dashboard,
    embedding_norm_rayleigh, factorize4, fit_nonneg_quasisymbol, pw_factorize, pw_majorant, random, sarason_test,
    tto_from_measure, tto_from_symbol, tto_space_basis, xnorm_bounds, BoundaryMeasure, DashboardOptions,
    EmbeddingReport, InnerFunction, ModelSpace, PwFunction, Symbol, C64,
};

use crate::parse;
use crate::{CliError, Format, RunConfig};

pub struct Report {
    pub body: String,
    pub summary: String,
}

fn json_body<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map_err(|e| CliError::Numeric(e.to_string()))
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<(), CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("`{command}` has no CSV form"))),
        _ => Ok(()),
    }
}

fn check(cfg: &RunConfig, name: &str, invariant: &str, value: f64) -> Result<(), CliError> {
    let limit = cfg.tol(name);
    if value.is_nan() || value > limit {
        return Err(CliError::Tolerance(format!(
            "{invariant} = {value:.3e} exceeds --tol {name}={limit:.1e}"
        )));
    }
    Ok(())
}

fn space(cfg: &RunConfig) -> Result<ModelSpace, CliError> {
    Ok(ModelSpace::new(cfg.theta()?, cfg.grid)?)
}

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

pub fn inner_info(cfg: &RunConfig, at: Option<&str>) -> Result<Report, CliError> {
    json_only(cfg, "inner info")?;
    let th = cfg.theta()?;
    let mut doc = json!({
        "theta_id": th.theta_id(),
        "degree": th.degree(),
        "zeros": th.zeros().iter().map(|z| to_pair(*z)).collect::<Vec<_>>(),
        "front": to_pair(th.front()),
        "value_at_origin": to_pair(th.eval(C64::new(0.0, 0.0))?),
    });
    let mut summary = format!("theta_id={} degree={}", th.theta_id(), th.degree());
    if let Some(src) = at {
        let z = parse::complex(src).map_err(CliError::Usage)?;
        let v = th.eval(z)?;
        doc["at"] = json!(to_pair(z));
        doc["value"] = json!(to_pair(v));
        summary.push_str(&format!(" value={:.12e}{:+.12e}i", v.re, v.im));
        if (z.norm() - 1.0).abs() < 1e-12 {
            let d = th.boundary_deriv_mod(z);
            doc["boundary_deriv_mod"] = json!(d);
            summary.push_str(&format!(" boundary_deriv_mod={d:.12e}"));
        }
    }
    Ok(Report {
        body: json_body(&doc)?,
        summary,
    })
}

pub fn inner_sublevel(cfg: &RunConfig, eps: f64, res: usize) -> Result<Report, CliError> {
    json_only(cfg, "inner sublevel")?;
    let th = cfg.theta()?;
    let count = th.sublevel_components(eps, res)?;
    Ok(Report {
        body: json_body(&json!({ "theta_id": th.theta_id(), "eps": eps, "grid_res": res, "components": count }))?,
        summary: format!("components={count}"),
    })
}

pub fn clark_run(cfg: &RunConfig, alpha: &str) -> Result<Report, CliError> {
    json_only(cfg, "clark measure")?;
    let m = space(cfg)?;
    let alpha = parse::complex(alpha).map_err(CliError::Usage)?;
    let data = clark_measure(m.theta(), alpha)?;
    let dev = clark_isometry_check(&m, &data);
    check(cfg, "isometry", "clark_isometry_deviation", dev)?;
    Ok(Report {
        body: json_body(&data)?,
        summary: format!("atoms={} isometry_deviation={dev:.1e}", data.atoms.len()),
    })
}

pub fn clark_partition(cfg: &RunConfig) -> Result<Report, CliError> {
    json_only(cfg, "clark partition")?;
    let th = cfg.theta()?;
    let p = clark_union_partition(&th)?;
    Ok(Report {
        body: json_body(&p)?,
        summary: format!("points={} a_emp={:.6e} max_gap_error={:.1e}", p.points.len(), p.a_emp, p.max_gap_error()),
    })
}

pub fn tto_build(cfg: &RunConfig, symbol: &str) -> Result<Report, CliError> {
    json_only(cfg, "tto build")?;
    let m = space(cfg)?;
    let coefs = parse::fourier_coefficients(&parse::laurent(symbol).map_err(CliError::Usage)?);
    let a = tto_from_symbol(&m, &Symbol::Fourier(coefs))?;
    let res = sarason_test(&m, &a)?;
    check(cfg, "sarason", "sarason_residual", res)?;
    Ok(Report {
        body: json_body(&a)?,
        summary: format!("sarason_residual={res:.1e}"),
    })
}

pub fn tto_basis(cfg: &RunConfig) -> Result<Report, CliError> {
    json_only(cfg, "tto basis")?;
    let m = space(cfg)?;
    let basis = tto_space_basis(&m)?;
    let mut worst = 0.0f64;
    for a in &basis {
        worst = worst.max(sarason_test(&m, a)?);
    }
    check(cfg, "sarason", "max_sarason_residual", worst)?;
    Ok(Report {
        body: json_body(&basis)?,
        summary: format!("dimension={} max_sarason_residual={worst:.1e}", basis.len()),
    })
}

pub fn tto_quasisymbol(cfg: &RunConfig, symbol: Option<&str>, measure: Option<&str>) -> Result<Report, CliError> {
    json_only(cfg, "tto quasisymbol")?;
    let m = space(cfg)?;
    let a = match (symbol, measure) {
        (Some(s), None) => {
            let coefs = parse::fourier_coefficients(&parse::laurent(s).map_err(CliError::Usage)?);
            tto_from_symbol(&m, &Symbol::Fourier(coefs))?
        }
        (None, Some(spec)) => {
            let mu = parse::measure(spec, m.theta(), m.grid_size(), &mut rng(cfg)).map_err(CliError::Usage)?;
            tto_from_measure(&m, &mu)?
        }
        _ => return Err(CliError::Usage("give exactly one of --symbol or --measure".into())),
    };
    let fit = fit_nonneg_quasisymbol(&m, &a, true)?;
    check(cfg, "quasisymbol", "quasisymbol_moment_residual", fit.residual)?;
    let doc = json!({
        "support": format!("{:?}", fit.support),
        "residual": fit.residual,
        "clark_pair_residual": fit.clark_pair_residual,
        "measure": fit.measure,
    });
    Ok(Report {
        body: json_body(&doc)?,
        summary: format!("support={:?} residual={:.1e}", fit.support, fit.residual),
    })
}

fn measures(cfg: &RunConfig, m: &ModelSpace, specs: &[String]) -> Result<Vec<BoundaryMeasure>, CliError> {
    if specs.is_empty() {
        return Err(CliError::Usage("give at least one --measure".into()));
    }
    let mut r = rng(cfg);
    specs
        .iter()
        .map(|s| parse::measure(s, m.theta(), m.grid_size(), &mut r).map_err(CliError::Usage))
        .collect()
}

pub fn embed_norm(cfg: &RunConfig, specs: &[String]) -> Result<Report, CliError> {
    json_only(cfg, "embed norm")?;
    let m = space(cfg)?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for mu in measures(cfg, &m, specs)? {
        let r = embedding_norm_rayleigh(&m, &mu, 1000, cfg.seed)?;
        summary.push(format!("{:.6e}", r.sigma_max));
        rows.push(json!({ "measure_id": mu.measure_id(), "c2": r.sigma_max, "rayleigh": r }));
    }
    Ok(Report {
        body: json_body(&rows)?,
        summary: format!("c2=[{}]", summary.join(",")),
    })
}

pub fn embed_commutator(cfg: &RunConfig, specs: &[String]) -> Result<Report, CliError> {
    json_only(cfg, "embed commutator")?;
    let m = space(cfg)?;
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for mu in measures(cfg, &m, specs)? {
        let v = commutator_check(&m, &mu)?;
        worst = worst.max(v);
        rows.push(json!({ "measure_id": mu.measure_id(), "mismatch": v }));
    }
    check(cfg, "commutator", "commutator_mismatch", worst)?;
    Ok(Report {
        body: json_body(&rows)?,
        summary: format!("max_commutator_mismatch={worst:.1e}"),
    })
}

fn reports_body(cfg: &RunConfig, reports: &[EmbeddingReport]) -> Result<String, CliError> {
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => json_body(&reports),
        Format::Csv => {
            let mut out = String::from(EmbeddingReport::CSV_HEADER);
            for r in reports {
                out.push('\n');
                out.push_str(&r.csv_row());
            }
            Ok(out)
        }
    }
}

pub fn embed_dashboard(cfg: &RunConfig, specs: &[String], opts: DashboardOptions) -> Result<Report, CliError> {
    let m = space(cfg)?;
    let mus = measures(cfg, &m, specs)?;
    let reports = constants_dashboard(&m, &mus, &opts)?;
    let excess = reports
        .iter()
        .map(|r| r.c1_lower - r.c2_theta.powi(2))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Report {
        body: reports_body(cfg, &reports)?,
        summary: format!("rows={} max_c1_lower_minus_c2sq={excess:.1e}", reports.len()),
    })
}

/// Samples of `x₁y₁ + x₂y₂` for random `x_k, y_k ∈ K_θ`.
fn random_f(m: &ModelSpace, rng: &mut ChaCha8Rng) -> Vec<C64> {
    let mut f = vec![C64::new(0.0, 0.0); m.grid_size()];
    for _ in 0..2 {
        let x = m.samples(&random::kfun(rng, m));
        let y = m.samples(&random::kfun(rng, m));
        for (v, (a, b)) in f.iter_mut().zip(x.iter().zip(&y)) {
            *v += a * b;
        }
    }
    f
}

fn laurent_samples(m: &ModelSpace, src: &str) -> Result<Vec<C64>, CliError> {
    let p = parse::laurent(src).map_err(CliError::Usage)?;
    Ok(m.nodes()
        .iter()
        .map(|z| p.iter().map(|(k, c)| c * z.powi(*k as i32)).sum())
        .collect())
}

pub fn factor_run(cfg: &RunConfig, random_input: bool, f: Option<&str>) -> Result<Report, CliError> {
    json_only(cfg, "factor run")?;
    let m = space(cfg)?;
    let samples = match (random_input, f) {
        (true, None) => random_f(&m, &mut rng(cfg)),
        (false, Some(src)) => laurent_samples(&m, src)?,
        _ => return Err(CliError::Usage("give exactly one of --random-f or --f".into())),
    };
    let r = factorize4(&m, &samples)?;
    check(cfg, "residual", "factorization_residual_rel", r.residual_rel)?;
    let ratio = if r.f_l1 > 0.0 { r.constant / r.f_l1 } else { 0.0 };
    Ok(Report {
        body: json_body(&r)?,
        summary: format!(
            "pairs={} residual_rel={:.1e} constant={:.6e} constant_ratio={ratio:.6e}",
            r.pairs.len(),
            r.residual_rel,
            r.constant
        ),
    })
}

pub fn factor_xnorm(cfg: &RunConfig, random_input: bool, h: Option<&str>) -> Result<Report, CliError> {
    json_only(cfg, "factor xnorm")?;
    let m = space(cfg)?;
    let samples = match (random_input, h) {
        (true, None) => {
            let mut r = rng(cfg);
            let x = m.samples(&random::kfun(&mut r, &m));
            let y = m.samples(&random::kfun(&mut r, &m));
            x.iter().zip(&y).map(|(a, b)| a * b.conj()).collect()
        }
        (false, Some(src)) => laurent_samples(&m, src)?,
        _ => return Err(CliError::Usage("give exactly one of --random-h or --h".into())),
    };
    let b = xnorm_bounds(&m, &samples)?;
    Ok(Report {
        body: json_body(&b)?,
        summary: format!("lower={:.6e} upper={:.6e}", b.lower, b.upper),
    })
}

/// `Σ a_k sinc⁴((t − s_k)/4)` with random real `a_k` and shifts.
fn random_pw(rng: &mut ChaCha8Rng, window: usize) -> Result<PwFunction, CliError> {
    let terms: Vec<(f64, f64)> = (0..4)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 16.0 - 8.0))
        .collect();
    let sinc = |x: f64| {
        if x.abs() < 1e-12 {
            1.0
        } else {
            (std::f64::consts::PI * x).sin() / (std::f64::consts::PI * x)
        }
    };
    Ok(PwFunction::sample(window, |t| {
        C64::new(terms.iter().map(|(a, s)| a * sinc((t - s) / 4.0).powi(4)).sum(), 0.0)
    })?)
}

pub fn factor_pw(cfg: &RunConfig, window: usize) -> Result<Report, CliError> {
    json_only(cfg, "factor pw")?;
    let f = random_pw(&mut rng(cfg), window)?;
    let maj = pw_majorant(&f)?;
    let fac = pw_factorize(&f)?;
    check(cfg, "pw_residual", "pw_factorization_residual", fac.residual)?;
    let doc = json!({
        "window": window,
        "majorant_c_rep": maj.c_rep,
        "majorant_margin": maj.margin,
        "factorization": fac,
    });
    Ok(Report {
        body: json_body(&doc)?,
        summary: format!(
            "pairs={} residual={:.1e} constant_ratio={:.6e} c_rep={:.6e}",
            fac.pairs.len(),
            fac.residual,
            fac.constant_ratio,
            maj.c_rep
        ),
    })
}

/// `1, 2, 4, …` up to and including `nmax`.
fn doubling(nmax: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = 1;
    while n < nmax {
        out.push(n);
        n *= 2;
    }
    out.push(nmax);
    out
}

#[derive(Serialize)]
struct VolbergRow {
    n: usize,
    theta_id: String,
    trials: usize,
    constant_ratio_max: f64,
    constant_ratio_mean: f64,
    residual_max: f64,
    pairs_max: usize,
}

fn volberg_row(n: usize, trials: usize, grid: usize, seed: u64) -> Result<VolbergRow, CliError> {
    let th = InnerFunction::monomial(n + 1);
    let m = ModelSpace::new(th, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut ratios = Vec::with_capacity(trials);
    let mut residual_max = 0.0f64;
    let mut pairs_max = 0;
    for _ in 0..trials {
        let coefs = random::analytic_poly(&mut rng, 2 * n);
        let f: Vec<C64> = m
            .nodes()
            .iter()
            .map(|z| coefs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * z + c))
            .collect();
        let r = factorize4(&m, &f)?;
        residual_max = residual_max.max(r.residual_rel);
        pairs_max = pairs_max.max(r.pairs.len());
        ratios.push(r.constant / r.f_l1);
    }
    Ok(VolbergRow {
        n,
        theta_id: m.theta_id().to_string(),
        trials,
        constant_ratio_max: ratios.iter().copied().fold(0.0, f64::max),
        constant_ratio_mean: ratios.iter().sum::<f64>() / trials as f64,
        residual_max,
        pairs_max,
    })
}

pub fn sweep_volberg(cfg: &RunConfig, nmax: usize, trials: usize) -> Result<Report, CliError> {
    if nmax == 0 || trials == 0 {
        return Err(CliError::Usage("--nmax and --trials must be positive".into()));
    }
    let ns = doubling(nmax);
    let rows: Vec<Result<VolbergRow, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| s.spawn(move || volberg_row(n, trials, cfg.grid, cfg.seed)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let worst = rows.iter().map(|r| r.residual_max).fold(0.0, f64::max);
    check(cfg, "residual", "factorization_residual_rel", worst)?;
    let body = match cfg.format.unwrap_or(Format::Csv) {
        Format::Json => json_body(&rows)?,
        Format::Csv => {
            let mut out = String::from("n,theta_id,trials,constant_ratio_max,constant_ratio_mean,residual_max,pairs_max");
            for r in &rows {
                out.push_str(&format!(
                    "\n{},{},{},{:.12e},{:.12e},{:.3e},{}",
                    r.n, r.theta_id, r.trials, r.constant_ratio_max, r.constant_ratio_mean, r.residual_max, r.pairs_max
                ));
            }
            out
        }
    };
    let hi = rows.iter().map(|r| r.constant_ratio_max).fold(0.0, f64::max);
    Ok(Report {
        body,
        summary: format!("rows={} max_constant_ratio={hi:.6e} max_residual={worst:.1e}", rows.len()),
    })
}

pub fn sweep_dashboard(cfg: &RunConfig, nmax: usize, opts: DashboardOptions) -> Result<Report, CliError> {
    if nmax == 0 {
        return Err(CliError::Usage("--nmax must be positive".into()));
    }
    let ns = doubling(nmax);
    let parts: Vec<Result<Vec<EmbeddingReport>, CliError>> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .iter()
            .map(|&n| {
                let opts = opts.clone();
                s.spawn(move || {
                    let th = InnerFunction::monomial(n);
                    let m = ModelSpace::new(th.clone(), cfg.grid)?;
                    let sigma = clark_measure(&th, C64::new(1.0, 0.0))?.to_measure();
                    let mus = [BoundaryMeasure::lebesgue(cfg.grid), sigma];
                    Ok(constants_dashboard(&m, &mus, &opts)?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });
    let mut reports = Vec::new();
    for p in parts {
        reports.extend(p?);
    }
    let cfg_csv = RunConfig {
        format: Some(cfg.format.unwrap_or(Format::Csv)),
        ..cfg.clone()
    };
    Ok(Report {
        body: reports_body(&cfg_csv, &reports)?,
        summary: format!("rows={}", reports.len()),
    })
}
