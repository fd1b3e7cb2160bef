mod common;

use common::{c, random_product, random_real_x};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttolab::linalg::{max_abs, spectral_norm};
use ttolab::measure::Atom;
use ttolab::{
    clark_isometry_check, clark_measure, constants_dashboard, crofoot_conjugate, dyakonov_root, factorize4,
    majorant_clark, random, sarason_test, tto_from_symbol, tto_space_basis, xnorm_bounds, BoundaryMeasure,
    DashboardOptions, ModelSpace, Symbol, C64,
};

fn space(seed: u64, degree: usize, zero_at_origin: bool) -> (ChaCha8Rng, ModelSpace) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let th = random::blaschke(&mut rng, degree, 0.85, zero_at_origin);
    let m = ModelSpace::with_default_grid(th).unwrap();
    (rng, m)
}

fn atoms(angles: &[(f64, f64)]) -> BoundaryMeasure {
    BoundaryMeasure::from_atoms(
        angles
            .iter()
            .map(|&(angle, w)| Atom {
                angle,
                radius: 1.0,
                weight: c(w, 0.0),
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn involution_is_isometric(seed in any::<u64>(), degree in 1usize..9) {
        let (mut rng, m) = space(seed, degree, false);
        let f = random::kfun(&mut rng, &m);
        let g = m.involution(&f).unwrap();
        prop_assert!((g.norm() - f.norm()).abs() <= 1e-10 * f.norm().max(1.0));
    }

    #[test]
    fn clark_measures_are_isometric(seed in any::<u64>(), degree in 1usize..9, x in 0.0..std::f64::consts::TAU) {
        let (_, m) = space(seed, degree, false);
        let cl = clark_measure(m.theta(), C64::from_polar(1.0, x)).unwrap();
        prop_assert_eq!(cl.atoms.len(), degree);
        prop_assert!(clark_isometry_check(&m, &cl) <= 1e-9);
    }

    #[test]
    fn symbols_give_ttos(seed in any::<u64>(), degree in 1usize..9, width in 0usize..12) {
        let (mut rng, m) = space(seed, degree, false);
        let a = tto_from_symbol(&m, &Symbol::Fourier(random::trig_poly(&mut rng, width))).unwrap();
        prop_assert!(sarason_test(&m, &a).unwrap() <= 1e-9);
    }

    #[test]
    fn crofoot_is_unitary(seed in any::<u64>(), degree in 1usize..8) {
        let (mut rng, m) = space(seed, degree, false);
        let w = m.theta().eval(c(0.0, 0.0)).unwrap();
        let a = tto_from_symbol(&m, &Symbol::Fourier(random::trig_poly(&mut rng, 3))).unwrap();
        let (cf, b) = crofoot_conjugate(&m, &a, w).unwrap();
        prop_assert!(cf.unitarity <= 1e-9);
        prop_assert!((spectral_norm(&b.matrix) - spectral_norm(&a.matrix)).abs() <= 1e-9 * spectral_norm(&a.matrix).max(1.0));
    }

    #[test]
    fn embedding_constants_are_ordered(
        seed in any::<u64>(),
        degree in 1usize..6,
        pts in prop::collection::vec((0.0..std::f64::consts::TAU, 0.01f64..2.0), 1..6),
    ) {
        let (_, m) = space(seed, degree, true);
        let opts = DashboardOptions { pairs: 60, pp_trials: 10, factor_trials: 1, ..DashboardOptions::default() };
        let rep = constants_dashboard(&m, &[atoms(&pts)], &opts).unwrap();
        let r = &rep[0];
        prop_assert!(r.c1_lower <= r.c2_theta.powi(2) + 1e-12);
        prop_assert!(r.c2_theta <= r.c2_theta2 * (1.0 + 1e-12));
        let block = r.c2_blocks[0].max(r.c2_blocks[1]);
        prop_assert!(r.c2_theta2 <= std::f64::consts::SQRT_2 * block * (1.0 + 1e-12));
    }

    #[test]
    fn dyakonov_roots_match_the_modulus(seed in any::<u64>(), degree in 1usize..8) {
        let (mut rng, m) = space(seed, degree, false);
        let x = m.samples(&random::kfun(&mut rng, &m));
        let y = m.samples(&random::kfun(&mut rng, &m));
        let f: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a.norm_sqr() + b.norm_sqr()).collect();
        let r = dyakonov_root(&m, &f).unwrap();
        prop_assert!(r.modulus_residual <= 1e-6);
        prop_assert_eq!(r.winding, 0);
    }

    #[test]
    fn majorants_dominate(seed in any::<u64>(), degree in 1usize..8) {
        let (mut rng, m) = space(seed, degree, false);
        let h = random_real_x(&mut rng, &m);
        let maj = majorant_clark(&m, &h, None).unwrap();
        let scale = h.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (g, v) in maj.g.iter().zip(&h) {
            prop_assert!(g - v.abs() >= -1e-9 * scale);
        }
        prop_assert!(maj.membership_residual <= 1e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn factorization_constant_dominates_l1(seed in any::<u64>(), degree in 1usize..7, origin in any::<bool>()) {
        let (mut rng, m) = space(seed, degree, origin);
        let f = random_product(&mut rng, &m);
        let r = factorize4(&m, &f).unwrap();
        prop_assert!(r.residual_rel <= 1e-6);
        prop_assert!(r.pairs.len() <= 4);
        prop_assert!(r.constant >= r.f_l1 * (1.0 - 1e-6));
    }

    #[test]
    fn pairing_respects_duality(seed in any::<u64>(), degree in 2usize..6) {
        let (mut rng, m) = space(seed, degree, true);
        let a = common::random_x_element(&mut rng, &m);
        let b = common::random_x_element(&mut rng, &m);
        let h: Vec<C64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
        let bounds = xnorm_bounds(&m, &h).unwrap();
        prop_assert!(bounds.lower <= bounds.upper * (1.0 + 1e-9));
        let basis = tto_space_basis(&m).unwrap();
        let mut op = &basis[0].matrix * random::normal_c64(&mut rng);
        for e in &basis[1..] {
            op += &e.matrix * random::normal_c64(&mut rng);
        }
        prop_assert!(max_abs(&op) > 0.0);
        prop_assert!(bounds.pairing(&op).norm() <= spectral_norm(&op) * bounds.upper + 1e-9);
    }
}
