// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::cpmaps::{underlying_with_residual, ModuleCPMap};
use crate::error::{Error, Result};
use crate::numerics::{least_squares_intertwiner, CMat, TolerancePolicy};
use crate::scalar::Real;

/// `Φ ∼ Ψ`: the underlying maps agree on all matrix units within `eq_abs_tol`.
///
/// By polarization and fullness of `X` this is `Φ(x)*Φ(x) = Ψ(x)*Ψ(x)` for
/// every `x`.
pub fn equivalent<R: Real>(phi: &ModuleCPMap<R>, psi: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> Result<bool> {
    phi.check_same_shape(psi)?;
    let (a, _) = underlying_with_residual(phi);
    let (b, _) = underlying_with_residual(psi);
    Ok(a.max_deviation(&b)? <= tol.eq_abs_tol)
}

/// The partial isometry `V` on `K` with `V Ψ(x) = Φ(x)`, `V V*` the projector
/// onto `[Φ(X)H]` and `V* V` the projector onto `[Ψ(X)H]`.
///
/// `V` sends `Ψ(E_i) e_j` to `Φ(E_i) e_j` and vanishes on the orthogonal
/// complement of `[Ψ(X)H]`; it is the minimal-norm solution of the paired
/// least-squares problem.
pub fn connecting_partial_isometry<R: Real>(
    phi: &ModuleCPMap<R>,
    psi: &ModuleCPMap<R>,
    tol: &TolerancePolicy<R>,
) -> Result<CMat<R>> {
    if !equivalent(phi, psi, tol)? {
        return Err(Error::NotEquivalent);
    }
    Ok(least_squares_intertwiner(&psi.spanning_columns(), &phi.spanning_columns(), tol)?.map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numerics::{identity, max_abs_diff, projector_onto_span};

    fn tol() -> TolerancePolicy<f64> {
        TolerancePolicy::default()
    }

    #[test]
    fn example_pairs_are_equivalent() {
        assert!(equivalent(&fixtures::flip_phi::<f64>(), &fixtures::flip_psi(), &tol()).unwrap());
        assert!(equivalent(&fixtures::degenerate_phi::<f64>(), &fixtures::degenerate_psi(), &tol()).unwrap());
    }

    #[test]
    fn scaling_breaks_equivalence() {
        let phi = fixtures::flip_phi::<f64>();
        assert!(!equivalent(&phi, &phi.scaled(2.0), &tol()).unwrap());
        assert!(matches!(
            connecting_partial_isometry(&phi, &phi.scaled(2.0), &tol()),
            Err(Error::NotEquivalent)
        ));
    }

    #[test]
    fn shapes_must_agree() {
        let a = fixtures::flip_phi::<f64>();
        let b = fixtures::degenerate_phi::<f64>();
        assert!(matches!(equivalent(&a, &b, &tol()), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn example_partial_isometries() {
        let v = connecting_partial_isometry(&fixtures::flip_phi::<f64>(), &fixtures::flip_psi(), &tol()).unwrap();
        assert!(max_abs_diff(&v, &fixtures::flip_partial_isometry()) < 1e-12);
        let v = connecting_partial_isometry(&fixtures::degenerate_phi::<f64>(), &fixtures::degenerate_psi(), &tol())
            .unwrap();
        assert!(max_abs_diff(&v, &fixtures::degenerate_partial_isometry()) < 1e-12);
    }

    #[test]
    fn self_connection_is_range_projector() {
        let phi = fixtures::degenerate_phi::<f64>();
        let v = connecting_partial_isometry(&phi, &phi, &tol()).unwrap();
        let p = projector_onto_span(&phi.spanning_columns(), &tol());
        assert!(max_abs_diff(&v, &p) < 1e-12);
        assert!(max_abs_diff(&v, &identity(5)) > 0.5);
    }
}
