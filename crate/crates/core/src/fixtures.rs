// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Worked examples on `X = A = M_2(C)`.
//!
//! Two pairs of equivalent maps (into `L(C^2, C^4)` and `L(C^2, C^5)`) with
//! their connecting partial isometries, plus the identity and block-doubled
//! maps used for purity checks.

use crate::cpmaps::{CPMap, ModuleCPMap};
use crate::modspace::HilbertModule;
use crate::numerics::{from_real_rows, CMat};
use crate::scalar::Real;

const H: f64 = 0.5;

fn m2() -> HilbertModule {
    HilbertModule::new(2, 2).expect("M_2 is a valid module")
}

/// Build a map on `M_2` from a formula `a ↦ rows` evaluated at each unit.
fn from_formula<R: Real>(q: usize, f: impl Fn([[f64; 2]; 2]) -> Vec<f64>) -> ModuleCPMap<R> {
    let module = m2();
    let images = (0..4)
        .map(|i| {
            let mut a = [[0.0; 2]; 2];
            a[i / 2][i % 2] = 1.0;
            from_real_rows(q, 2, &f(a))
        })
        .collect();
    ModuleCPMap::new(module, 2, q, images).expect("fixture shapes are consistent")
}

#[rustfmt::skip]
pub fn flip_phi<R: Real>() -> ModuleCPMap<R> {
    let r3 = 3f64.sqrt() / 2.0;
    from_formula(4, |a| {
        vec![
            r3 * a[0][0], r3 * a[0][1],
            r3 * a[1][0], r3 * a[1][1],
            H * a[0][0], -H * a[0][1],
            H * a[1][0], -H * a[1][1],
        ]
    })
}

#[rustfmt::skip]
pub fn flip_psi<R: Real>() -> ModuleCPMap<R> {
    let r3 = 3f64.sqrt() / 2.0;
    from_formula(4, |a| {
        vec![
            r3 * a[0][0], r3 * a[0][1],
            r3 * a[1][0], r3 * a[1][1],
            -H * a[0][0], H * a[0][1],
            H * a[1][0], -H * a[1][1],
        ]
    })
}

/// Common underlying map `a ↦ [[a11, a12/2], [a21/2, a22]]`.
pub fn flip_underlying<R: Real>() -> CPMap<R> {
    underlying_from(|a| vec![a[0][0], H * a[0][1], H * a[1][0], a[1][1]])
}

/// `diag(1, 1, -1, 1)`.
pub fn flip_partial_isometry<R: Real>() -> CMat<R> {
    from_real_rows(
        4,
        4,
        &[
            1., 0., 0., 0., //
            0., 1., 0., 0., //
            0., 0., -1., 0., //
            0., 0., 0., 1.,
        ],
    )
}

#[rustfmt::skip]
pub fn degenerate_phi<R: Real>() -> ModuleCPMap<R> {
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    from_formula(5, |a| {
        vec![
            r2 * a[0][0], 0.0,
            0.0, r3 * a[1][1],
            0.0, 0.0,
            r2 * a[1][0], 0.0,
            0.0, r3 * a[0][1],
        ]
    })
}

#[rustfmt::skip]
pub fn degenerate_psi<R: Real>() -> ModuleCPMap<R> {
    let (r2, r3) = (2f64.sqrt(), 3f64.sqrt());
    from_formula(5, |a| {
        vec![
            a[0][0], -a[1][1],
            a[0][0], a[1][1],
            0.0, r3 * a[0][1],
            r2 * a[1][0], 0.0,
            0.0, a[1][1],
        ]
    })
}

/// Common underlying map `a ↦ diag(2 a11, 3 a22)`.
pub fn degenerate_underlying<R: Real>() -> CPMap<R> {
    underlying_from(|a| vec![2.0 * a[0][0], 0.0, 0.0, 3.0 * a[1][1]])
}

/// The 5×5 partial isometry `V` with `Φ = V Ψ`.
pub fn degenerate_partial_isometry<R: Real>() -> CMat<R> {
    let (h2, t3) = (2f64.sqrt() / 2.0, 3f64.sqrt() / 3.0);
    from_real_rows(
        5,
        5,
        &[
            h2, h2, 0., 0., 0., //
            -t3, t3, 0., 0., t3, //
            0., 0., 0., 0., 0., //
            0., 0., 0., 1., 0., //
            0., 0., 1., 0., 0.,
        ],
    )
}

/// Unit vector `(1, -1, 0, 0, 2)/√6` orthogonal to `[Ψ(X)H]` in the second example.
pub fn degenerate_psi_kernel_direction<R: Real>() -> CMat<R> {
    let s = 6f64.sqrt();
    from_real_rows(5, 1, &[1. / s, -1. / s, 0., 0., 2. / s])
}

/// `x ↦ x` on `M_2`.
pub fn identity_m2<R: Real>() -> ModuleCPMap<R> {
    ModuleCPMap::identity(m2())
}

/// `x ↦ x ⊕ x` on `M_2` with `H = K = C^4`.
pub fn block_doubled_m2<R: Real>() -> ModuleCPMap<R> {
    ModuleCPMap::amplified_identity(m2(), 2)
}

fn underlying_from<R: Real>(f: impl Fn([[f64; 2]; 2]) -> Vec<f64>) -> CPMap<R> {
    let images = (0..4)
        .map(|i| {
            let mut a = [[0.0; 2]; 2];
            a[i / 2][i % 2] = 1.0;
            from_real_rows(2, 2, &f(a))
        })
        .collect();
    CPMap::new(2, 2, images).expect("fixture shapes are consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::max_abs_diff;

    #[test]
    fn partial_isometries_intertwine_the_pairs() {
        for (phi, psi, v) in [
            (flip_phi::<f64>(), flip_psi(), flip_partial_isometry()),
            (degenerate_phi(), degenerate_psi(), degenerate_partial_isometry()),
        ] {
            for (a, b) in phi.images().iter().zip(psi.images()) {
                assert!(max_abs_diff(a, &(&v * b)) < 1e-15);
            }
        }
    }

    #[test]
    fn kernel_direction_is_annihilated() {
        let v = degenerate_partial_isometry::<f64>();
        let n = degenerate_psi_kernel_direction::<f64>();
        assert!(crate::numerics::max_abs(&(&v * &n)) < 1e-15);
        for img in degenerate_psi::<f64>().images() {
            assert!(crate::numerics::max_abs(&(n.adjoint() * img)) < 1e-15);
        }
    }
}
