// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::cpmaps::{choi, validate_module_cp, CPMap, ModuleCPMap};
use crate::error::{Error, Result};
use crate::numerics::{order_scale, psd_margin, psd_order_leq, TolerancePolicy};
use crate::oracle::{sample_module_elements, SampleConfig};
use crate::scalar::Real;

/// How `Ψ ≼ Φ` is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DominationMode {
    /// `φ - ψ` completely positive: `Choi(ψ) ≤ Choi(φ)`.
    Complete,
    /// `ψ(<x, x>) ≤ φ(<x, x>)` on sampled `x`. Necessary, not sufficient.
    PointwiseSampled(SampleConfig),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationVerdict<R> {
    pub dominated: bool,
    pub mode: DominationMode,
    /// Smallest eigenvalue of `Choi(φ - ψ)`, or of `φ(<x,x>) - ψ(<x,x>)`
    /// over the samples.
    pub margin: R,
}

/// Decides `Ψ ≼ Φ`, i.e. whether `psi` is dominated by `phi`.
pub fn is_dominated<R: Real>(
    psi: &ModuleCPMap<R>,
    phi: &ModuleCPMap<R>,
    mode: DominationMode,
    tol: &TolerancePolicy<R>,
) -> Result<DominationVerdict<R>> {
    phi.check_same_shape(psi)?;
    let a = valid_underlying(psi, tol)?;
    let b = valid_underlying(phi, tol)?;
    match mode {
        DominationMode::Complete => {
            let (ca, cb) = (choi(&a).into_value(), choi(&b).into_value());
            Ok(DominationVerdict {
                dominated: psd_order_leq(&ca, &cb, tol)?,
                mode,
                margin: psd_margin(&ca, &cb),
            })
        }
        DominationMode::PointwiseSampled(cfg) => {
            let mut dominated = true;
            let mut margin = R::max_value().unwrap_or_else(R::one);
            for x in sample_module_elements::<R>(&psi.module(), &cfg) {
                let ip = x.value().adjoint() * x.value();
                let (lo, hi) = (a.eval(&ip), b.eval(&ip));
                dominated &= psd_order_leq(&lo, &hi, tol)?;
                margin = margin.min(psd_margin(&lo, &hi) / order_scale(&lo, &hi));
            }
            Ok(DominationVerdict {
                dominated,
                mode,
                margin,
            })
        }
    }
}

fn valid_underlying<R: Real>(map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> Result<CPMap<R>> {
    let report = validate_module_cp(map, tol);
    if !report.is_valid {
        return Err(Error::NotAModuleCPMap(report.residual.as_f64()));
    }
    Ok(report.phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tol() -> TolerancePolicy<f64> {
        TolerancePolicy::default()
    }

    fn sampled() -> DominationMode {
        DominationMode::PointwiseSampled(SampleConfig::new(7, 32, 1.0).unwrap())
    }

    #[test]
    fn reflexive() {
        let phi = fixtures::degenerate_phi::<f64>();
        for mode in [DominationMode::Complete, sampled()] {
            assert!(is_dominated(&phi, &phi, mode, &tol()).unwrap().dominated);
        }
    }

    #[test]
    fn half_is_dominated_not_double() {
        let phi = fixtures::flip_phi::<f64>();
        for mode in [DominationMode::Complete, sampled()] {
            assert!(is_dominated(&phi.scaled(0.5), &phi, mode, &tol()).unwrap().dominated);
            assert!(!is_dominated(&phi.scaled(2.0), &phi, mode, &tol()).unwrap().dominated);
        }
    }

    #[test]
    fn zero_is_dominated() {
        let phi = fixtures::flip_phi::<f64>();
        let zero = ModuleCPMap::zero(phi.module(), 2, 4);
        assert!(
            is_dominated(&zero, &phi, DominationMode::Complete, &tol())
                .unwrap()
                .dominated
        );
    }

    #[test]
    fn shapes_and_validity_are_checked() {
        let a = fixtures::flip_phi::<f64>();
        let b = fixtures::degenerate_phi::<f64>();
        assert!(matches!(
            is_dominated(&a, &b, DominationMode::Complete, &tol()),
            Err(Error::ShapeMismatch(_))
        ));
        let mut images = a.images().to_vec();
        images[0] *= nalgebra::Complex::new(3.0, 0.0);
        let bad = ModuleCPMap::new(a.module(), 2, 4, images).unwrap();
        assert!(matches!(
            is_dominated(&bad, &a, DominationMode::Complete, &tol()),
            Err(Error::NotAModuleCPMap(_))
        ));
    }
}
