// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! The sampled oracle agrees with the basis-level verdicts.

use proptest::prelude::*;

use cpmod::compare::equivalent;
use cpmod::dilation::{construct, ModuleStinespring};
use cpmod::oracle::{
    random_module_map, random_unitary, rng, sample_module_elements, verify_equivalence_pointwise, verify_factorization,
    SampleConfig,
};
use cpmod::{fixtures, HilbertModule, ModuleMap, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn fixture_pairs() -> Vec<(&'static str, ModuleMap, ModuleMap)> {
    vec![
        ("flip", fixtures::flip_phi(), fixtures::flip_psi()),
        ("degenerate", fixtures::degenerate_phi(), fixtures::degenerate_psi()),
        ("identity", fixtures::identity_m2(), fixtures::identity_m2()),
        ("doubled", fixtures::block_doubled_m2(), fixtures::block_doubled_m2()),
    ]
}

#[test]
fn verdicts_and_residuals_agree_on_fixtures() {
    let cfg = SampleConfig::new(7, 64, 1.0).unwrap();
    let t = tol();
    for (name, phi, psi) in fixture_pairs() {
        assert!(equivalent(&phi, &psi, &t).unwrap(), "{name}");
        let res = verify_equivalence_pointwise(&phi, &psi, &cfg).unwrap();
        assert!(res <= t.eq_abs_tol, "{name}: {res:e}");

        let doubled = phi.scaled(2.0);
        assert!(!equivalent(&phi, &doubled, &t).unwrap(), "{name}");
        let res = verify_equivalence_pointwise(&phi, &doubled, &cfg).unwrap();
        assert!(res > t.eq_abs_tol, "{name}: {res:e}");

        for map in [&phi, &psi] {
            let q = construct(map, &t).unwrap();
            assert!(verify_factorization(&q, map, &cfg) <= 1e-9, "{name}");
            let mut w = q.w().clone();
            w[(0, 0)].re += 0.1;
            let bad =
                ModuleStinespring::from_parts(q.module(), q.pi_phi().clone(), q.pi_x_images().to_vec(), w).unwrap();
            assert!(verify_factorization(&bad, map, &cfg) > 1e-3, "{name}");
        }
    }
}

#[test]
fn flip_pair_pointwise_residual_is_tiny() {
    let res =
        verify_equivalence_pointwise::<f64>(&fixtures::flip_phi(), &fixtures::flip_psi(), &SampleConfig::default())
            .unwrap();
    assert!(res <= 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sampling_is_reproducible(seed: u64, samples in 1usize..=16, k in 1usize..=3, m in 1usize..=3) {
        let module = HilbertModule::new(k, m).unwrap();
        let cfg = SampleConfig::new(seed, samples, 1.0).unwrap();
        let a = sample_module_elements::<f64>(&module, &cfg);
        let b = sample_module_elements::<f64>(&module, &cfg);
        prop_assert_eq!(a.len(), samples);
        prop_assert_eq!(&a, &b);
        let other = SampleConfig::new(seed.wrapping_add(1), samples, 1.0).unwrap();
        prop_assert_ne!(a, sample_module_elements::<f64>(&module, &other));
    }

    #[test]
    fn oracle_confirms_random_verdicts(seed: u64, k in 1usize..=2, m in 1usize..=3, p in 1usize..=3) {
        let mut g = rng(seed);
        let module = HilbertModule::new(k, m).unwrap();
        let phi = random_module_map(&mut g, module, p, k + 1, 1).unwrap();
        let psi = phi.compose_left(&random_unitary(&mut g, phi.q())).unwrap();
        let cfg = SampleConfig::new(seed, 16, 1.0).unwrap();
        prop_assert!(equivalent(&phi, &psi, &tol()).unwrap());
        prop_assert!(verify_equivalence_pointwise(&phi, &psi, &cfg).unwrap() <= tol().eq_abs_tol);
        let q = construct(&phi, &tol()).unwrap();
        prop_assert!(verify_factorization(&q, &phi, &cfg) <= 1e-9);
    }
}
