mod common;

use common::c;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttolab::linalg::{frobenius, max_abs};
use ttolab::measure::Atom;
use ttolab::{
    clark_measure, crofoot_conjugate, fit_nonneg_quasisymbol, random, rank_one, sarason_test, standard_symbol,
    tto_from_measure, tto_from_symbol, tto_space_basis, BoundaryMeasure, CMatrix, InnerFunction, ModelSpace, Support,
    Symbol, TtOperator, C64,
};

fn random_nonneg_measure(rng: &mut ChaCha8Rng, grid: usize) -> BoundaryMeasure {
    // |p|² for a random trig polynomial p, plus a few positive atoms.
    let p = random::trig_poly(rng, 3);
    let mut wide = vec![c(0.0, 0.0); grid];
    for (i, v) in p.iter().enumerate() {
        wide[ttolab::dft::slot(i as i64 - 3, grid)] = *v;
    }
    let density = ttolab::dft::synthesize(&wide).iter().map(|v| c(v.norm_sqr(), 0.0)).collect();
    let mut mu = BoundaryMeasure::from_density(density);
    for _ in 0..3 {
        mu.atoms.push(Atom {
            angle: rng.random::<f64>() * std::f64::consts::TAU,
            radius: 1.0,
            weight: c(rng.random::<f64>(), 0.0),
        });
    }
    mu
}

#[test]
fn density_measure_matches_symbol() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let th = random::blaschke(&mut rng, 5, 0.9, false);
    let m = ModelSpace::with_default_grid(th).unwrap();
    let phi = Symbol::Fourier(random::trig_poly(&mut rng, 6));
    let samples = phi.samples(m.grid_size()).unwrap();
    let a = tto_from_symbol(&m, &phi).unwrap();
    let b = tto_from_measure(&m, &BoundaryMeasure::from_density(samples)).unwrap();
    assert!(max_abs(&(a.matrix - b.matrix)) < 1e-10);
}

#[test]
fn clark_measure_gives_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let th = random::blaschke(&mut rng, 6, 0.9, false);
        let m = ModelSpace::with_default_grid(th.clone()).unwrap();
        let alpha = random::unimodular(&mut rng);
        let a = tto_from_measure(&m, &clark_measure(&th, alpha).unwrap().to_measure()).unwrap();
        assert!(max_abs(&(a.matrix - CMatrix::identity(6, 6))) < 1e-9);
    }
}

#[test]
fn basis_elements_pass_sarason() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let th = random::blaschke(&mut rng, 4, 0.9, false);
    let m = ModelSpace::with_default_grid(th).unwrap();
    let basis = tto_space_basis(&m).unwrap();
    assert_eq!(basis.len(), 7);
    for a in &basis {
        assert!(sarason_test(&m, a).unwrap() <= 1e-10);
    }
}

#[test]
fn monomial_tto_space_is_toeplitz() {
    let m = ModelSpace::new(InnerFunction::monomial(5), 256).unwrap();
    for a in tto_space_basis(&m).unwrap() {
        for i in 1..5 {
            for j in 1..5 {
                assert!((a.matrix[(i, j)] - a.matrix[(i - 1, j - 1)]).norm() < 1e-10);
            }
        }
    }
}

#[test]
fn hermitian_standard_symbol_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let th = random::blaschke(&mut rng, 5, 0.9, false);
    let m = ModelSpace::with_default_grid(th).unwrap();
    let b = tto_from_symbol(&m, &Symbol::Fourier(random::trig_poly(&mut rng, 4))).unwrap();
    let a = TtOperator::new(&m, &b.matrix + b.matrix.adjoint());
    let s = standard_symbol(&m, &a).unwrap();
    let rebuilt = tto_from_symbol(&m, &Symbol::Grid(s.samples(&m))).unwrap();
    assert!(frobenius(&(rebuilt.matrix - &a.matrix)) < 1e-9);
}

#[test]
fn rank_one_duality() {
    // tr(T_λ M) for M = x y* equals (z̄θ x ȳ)(λ), i.e. x(λ)·ỹ(λ).
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let th = random::blaschke(&mut rng, 5, 0.8, true);
    let m = ModelSpace::with_default_grid(th).unwrap();
    for _ in 0..10 {
        let x = random::kfun(&mut rng, &m);
        let y = random::kfun(&mut rng, &m);
        let lambda = random::disk_point(&mut rng, 0.9);
        let t = rank_one(&m, lambda).unwrap();
        assert!(sarason_test(&m, &t).unwrap() <= 1e-10);
        let pairing = (y.vector().adjoint() * &t.matrix * x.vector())[(0, 0)];
        let direct = m.eval(&x, lambda) * m.eval(&m.involution(&y).unwrap(), lambda);
        assert!((pairing - direct).norm() < 1e-10 * (1.0 + direct.norm()));
    }
}

#[test]
fn crofoot_transports_quasisymbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for _ in 0..5 {
        let th = random::blaschke(&mut rng, 5, 0.8, false);
        let m = ModelSpace::with_default_grid(th.clone()).unwrap();
        let w = th.eval(c(0.0, 0.0)).unwrap();
        let a = tto_from_symbol(&m, &Symbol::Fourier(random::trig_poly(&mut rng, 3))).unwrap();
        let (cf, b) = crofoot_conjugate(&m, &a, w).unwrap();
        assert!(cf.target.theta().eval(c(0.0, 0.0)).unwrap().norm() < 1e-12);
        assert!(cf.unitarity < 1e-10);
        assert!(sarason_test(&cf.target, &b).unwrap() <= 1e-9);
        let mu = random_nonneg_measure(&mut rng, m.grid_size());
        let on_target = tto_from_measure(&cf.target, &mu).unwrap();
        let pulled = tto_from_measure(&m, &cf.pull_back_measure(&m, &mu)).unwrap();
        let back = cf.backward(&m, &on_target);
        assert!(max_abs(&(back.matrix - pulled.matrix)) < 1e-9);
    }
}

#[test]
fn nonnegative_symbol_recovers_a_measure() {
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    for _ in 0..5 {
        let th = random::blaschke(&mut rng, 5, 0.8, true);
        let m = ModelSpace::with_default_grid(th).unwrap();
        let a = tto_from_measure(&m, &random_nonneg_measure(&mut rng, m.grid_size())).unwrap();
        let fit = fit_nonneg_quasisymbol(&m, &a, true).unwrap();
        assert!(fit.measure.is_nonnegative(0.0));
        assert!(fit.residual <= 1e-8);
        let rebuilt = tto_from_measure(&m, &fit.measure).unwrap();
        assert!(frobenius(&(rebuilt.matrix - &a.matrix)) <= 1e-8 * frobenius(&a.matrix));
    }
}

#[test]
fn identity_uses_clark_support() {
    let th = InnerFunction::new(vec![c(0.0, 0.0), c(0.5, 0.2), c(-0.4, -0.1)], c(0.0, 1.0)).unwrap();
    let m = ModelSpace::with_default_grid(th).unwrap();
    let fit = fit_nonneg_quasisymbol(&m, &TtOperator::new(&m, CMatrix::identity(3, 3)), true).unwrap();
    assert_eq!(fit.support, Support::ClarkPair);
    assert!((fit.measure.mass() - C64::new(1.0, 0.0)).norm() < 1e-8);
}
