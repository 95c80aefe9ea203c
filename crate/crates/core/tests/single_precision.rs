// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! The generic core in `f32`, with the looser `f32` default tolerances.

use cpmod::compare::{commutant, connecting_partial_isometry, equivalent, is_pure, rn_derivative};
use cpmod::cpmaps::validate_module_cp;
use cpmod::dilation::{construct, quintuples_unitarily_equivalent};
use cpmod::numerics::{identity, max_abs_diff, TolerancePolicy};
use cpmod::{fixtures, ModuleCPMap};

fn tol() -> TolerancePolicy<f32> {
    TolerancePolicy::default()
}

#[test]
fn first_example_in_single_precision() {
    let (phi, psi): (ModuleCPMap<f32>, ModuleCPMap<f32>) = (fixtures::flip_phi(), fixtures::flip_psi());
    let t = tol();
    assert!(validate_module_cp(&phi, &t).is_valid);
    assert!(equivalent(&phi, &psi, &t).unwrap());
    let v = connecting_partial_isometry(&phi, &psi, &t).unwrap();
    assert!(max_abs_diff(&v, &fixtures::flip_partial_isometry()) <= 1e-4);

    let (a, b) = (construct(&phi, &t).unwrap(), construct(&psi, &t).unwrap());
    assert!(a.invariants(&phi, &t).all_hold(&t));
    assert!(quintuples_unitarily_equivalent(&a, &b, &t).unwrap().0);

    let d = rn_derivative(&phi, &phi, &t).unwrap();
    assert!(max_abs_diff(&d.delta1, &identity(a.d_h())) <= 1e-4);
    assert!(max_abs_diff(&d.delta2, &identity(a.d_k())) <= 1e-4);
}

#[test]
fn purity_in_single_precision() {
    let t = tol();
    assert!(is_pure::<f32>(&fixtures::identity_m2(), &t).unwrap().pure);
    let doubled = fixtures::block_doubled_m2::<f32>();
    assert_eq!(commutant(&construct(&doubled, &t).unwrap(), &t).dim(), 4);
}
