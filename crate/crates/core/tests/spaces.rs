mod common;

use common::c;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use ttolab::{clark_isometry_check, clark_measure, clark_union_partition, random, InnerFunction, ModelSpace, C64};

#[test]
fn reproducing_property_against_cauchy_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let th = random::blaschke(&mut rng, 5, 0.8, false);
        let m = ModelSpace::new(th, 1024).unwrap();
        let f = random::kfun(&mut rng, &m);
        let lambda = random::disk_point(&mut rng, 0.7);
        // f(λ) = (1/N) Σ f(t_j)/(1 − λ t̄_j) for analytic f on an N-point grid.
        let samples = m.samples(&f);
        let cauchy: C64 = samples
            .iter()
            .zip(m.nodes())
            .map(|(v, t)| v / (c(1.0, 0.0) - lambda * t.conj()))
            .sum::<C64>()
            / 1024.0;
        let k = m.repro_kernel(lambda).unwrap();
        assert!((f.inner(&k) - cauchy).norm() <= 1e-10 * f.norm());
    }
}

#[test]
fn conjugate_kernel_is_involution_of_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..10 {
        let th = random::blaschke(&mut rng, 6, 0.9, false);
        let m = ModelSpace::new(th, 2048).unwrap();
        let lambda = random::disk_point(&mut rng, 0.9);
        let a = m.conj_kernel(lambda).unwrap();
        let b = m.involution(&m.repro_kernel(lambda).unwrap()).unwrap();
        let diff: f64 = a.coef.iter().zip(&b.coef).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff:e}");
    }
}

#[test]
fn involution_is_an_isometric_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let th = random::blaschke(&mut rng, 7, 0.9, false);
    let m = ModelSpace::with_default_grid(th).unwrap();
    for _ in 0..10 {
        let f = random::kfun(&mut rng, &m);
        let g = m.involution(&f).unwrap();
        assert!((g.norm() - f.norm()).abs() < 1e-10);
        let back = m.involution(&g).unwrap();
        let diff: f64 = back.coef.iter().zip(&f.coef).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10);
    }
}

#[test]
fn gram_matrix_of_degree_five_basis() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let th = random::blaschke(&mut rng, 5, 0.9, false);
    let m = ModelSpace::with_default_grid(th).unwrap();
    assert!(m.gram_deviation() < 1e-10);
}

#[test]
fn branch_increases_by_two_pi_degree() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for deg in 1..6 {
        let th = random::blaschke(&mut rng, deg, 0.9, false);
        let psi = th.arg_branch().unwrap();
        let x = rng.random::<f64>() * TAU;
        assert!((psi.psi(x + TAU) - psi.psi(x) - TAU * deg as f64).abs() < 1e-9);
    }
}

#[test]
fn random_clark_measure_is_isometric() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let th = random::blaschke(&mut rng, 6, 0.9, false);
    let m = ModelSpace::with_default_grid(th.clone()).unwrap();
    let cl = clark_measure(&th, c(0.0, 1.0)).unwrap();
    assert_eq!(cl.atoms.len(), 6);
    assert!(clark_isometry_check(&m, &cl) <= 1e-9);
    // Normalized kernels at the atoms form an orthonormal basis.
    let ks: Vec<_> = cl
        .atoms
        .iter()
        .map(|a| {
            let k = m.repro_kernel(a.point()).unwrap();
            let n = k.norm();
            k.scaled(c(1.0 / n, 0.0))
        })
        .collect();
    for (i, a) in ks.iter().enumerate() {
        for (j, b) in ks.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((a.inner(b) - want).norm() < 1e-9);
        }
    }
}

#[test]
fn kernel_norm_at_atom_is_derivative_modulus() {
    let th = InnerFunction::new(vec![c(0.5, 0.0), c(-0.3, 0.4)], c(1.0, 0.0)).unwrap();
    let m = ModelSpace::with_default_grid(th.clone()).unwrap();
    for a in clark_measure(&th, c(-1.0, 0.0)).unwrap().atoms {
        let k = m.repro_kernel(a.point()).unwrap();
        assert!((k.norm().powi(2) - 1.0 / a.weight).abs() < 1e-9 / a.weight);
    }
}

#[test]
fn partition_of_monomials() {
    for n in [1usize, 3, 8] {
        let p = clark_union_partition(&InnerFunction::monomial(n)).unwrap();
        assert_eq!(p.points.len(), 2 * n);
        assert!((p.a_emp - 1.0).abs() < 1e-12);
        for k in 0..2 * n {
            let (s, e) = p.arc(k);
            assert!((e - s - PI / n as f64).abs() < 1e-9);
        }
    }
}
