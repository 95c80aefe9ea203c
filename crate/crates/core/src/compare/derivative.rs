// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use super::commutant::{commutant, compress, CommutantElement};
use super::domination::{is_dominated, DominationMode};
use super::equivalence::connecting_partial_isometry;
use crate::cpmaps::{ModuleCPMap, PhiStinespring};
use crate::dilation::{construct, ModuleStinespring};
use crate::error::{Error, Result};
use crate::numerics::{
    eigh, frobenius, hermitian_sqrt, identity, kernel_cut, least_squares_intertwiner, max_abs_diff, op_norm,
    orthonormal_span, CMat, TolerancePolicy,
};
use crate::scalar::Real;

/// Relative residual accepted for the intertwiners of [`rn_derivative`].
const RN_RESIDUAL_REL: f64 = 1e-6;

/// `Δ_Φ(Ψ) = Δ₁ ⊕ Δ₂` with its defining operators `J` and `I`.
#[derive(Debug, Clone)]
pub struct RNDerivative<R: Real> {
    /// `J: H_Φ -> H_Ψ`, `π_φ(a) V_Φ h ↦ π_ψ(a) V_Ψ h`.
    pub j: CMat<R>,
    /// `I: K_Φ -> K_Ψ`, `π_Φ(x) V_Φ h ↦ π_Ψ(x) V_Ψ h`.
    pub imap: CMat<R>,
    /// `J* J`.
    pub delta1: CMat<R>,
    /// `I* I`.
    pub delta2: CMat<R>,
    /// Residuals of the two least-squares intertwiners.
    pub j_residual: R,
    pub imap_residual: R,
    psi: ModuleCPMap<R>,
}

impl<R: Real> RNDerivative<R> {
    pub fn delta(&self) -> CommutantElement<R> {
        CommutantElement::new(self.delta1.clone(), self.delta2.clone())
    }

    /// The dominated map the derivative was computed for.
    pub fn psi(&self) -> &ModuleCPMap<R> {
        &self.psi
    }
}

/// Radon-Nikodym derivative of `Ψ` with respect to `Φ`.
///
/// Requires `Ψ ≼ Φ` in the complete order. The intertwiners are accepted up to
/// a residual of `1e-6` times the norm of the spanning sets and `‖J‖ ≤ 1`
/// up to the same slack; otherwise [`Error::NotDominated`] is returned.
pub fn rn_derivative<R: Real>(
    psi: &ModuleCPMap<R>,
    phi: &ModuleCPMap<R>,
    tol: &TolerancePolicy<R>,
) -> Result<RNDerivative<R>> {
    let verdict = is_dominated(psi, phi, DominationMode::Complete, tol)?;
    if !verdict.dominated {
        return Err(Error::NotDominated(format!(
            "Choi(φ - ψ) has eigenvalue {:e}",
            verdict.margin.as_f64()
        )));
    }
    let qa = construct(phi, tol)?;
    let qb = construct(psi, tol)?;
    let rel = R::lit(RN_RESIDUAL_REL).max(tol.eq_abs_tol);

    let fit = |from: CMat<R>, to: CMat<R>, what: &str| -> Result<(CMat<R>, R)> {
        let l = least_squares_intertwiner(&from, &to, tol)?;
        let scale = frobenius(&from).max(frobenius(&to)).max(R::one());
        if l.residual > rel * scale {
            return Err(Error::NotDominated(format!(
                "{what} residual {:e}",
                l.residual.as_f64()
            )));
        }
        let norm = op_norm(&l.map);
        if norm * norm > R::one() + rel {
            return Err(Error::NotDominated(format!("‖{what}‖ = {:e} exceeds 1", norm.as_f64())));
        }
        Ok((l.map, l.residual))
    };
    let (j, j_residual) = fit(qa.h_spanning_columns(), qb.h_spanning_columns(), "J")?;
    let (imap, imap_residual) = fit(qa.k_spanning_columns(), qb.k_spanning_columns(), "I")?;
    let delta1 = j.adjoint() * &j;
    let delta2 = imap.adjoint() * &imap;
    Ok(RNDerivative {
        j,
        imap,
        delta1,
        delta2,
        j_residual,
        imap_residual,
        psi: psi.clone(),
    })
}

/// `c` when `Δ₁ = c I` within `eq_abs_tol`.
///
/// For a pure `Φ` every derivative is scalar and `Ψ ∼ λΦ` with `λ² = c`.
pub fn scalar_derivative<R: Real>(d: &RNDerivative<R>, tol: &TolerancePolicy<R>) -> Option<R> {
    let n = d.delta1.nrows();
    if n == 0 {
        return None;
    }
    let c = d.delta1.trace().re / R::from_usize(n).expect("dimension fits");
    (max_abs_diff(&d.delta1, &(identity::<R>(n) * crate::scalar::C::new(c, R::zero()))) <= tol.eq_abs_tol).then_some(c)
}

/// Output of [`reconstruct_stinespring`].
#[derive(Debug, Clone)]
pub struct Reconstruction<R: Real> {
    /// Quintuple on `H_Φ ⊖ ker Δ₁` and `K_Φ ⊖ ker Δ₂` factorizing `Ψ`.
    pub quintuple: ModuleStinespring<R>,
    /// Partial isometry `C` on `K` with `C Φ_{√Δ}(x) = Ψ(x)`; the coisometry
    /// of the compressed quintuple is `p₂ W_Φ C*`.
    pub connecting: CMat<R>,
    /// Eigenvalues of `Δ₁` or `Δ₂` within a factor 10 of the kernel threshold.
    pub warnings: Vec<String>,
}

/// Stinespring quintuple of `Ψ` recovered from that of `Φ` and `Δ_Φ(Ψ)`.
///
/// With `p₁`, `p₂` the range projectors of `Δ₁`, `Δ₂` and `B₁`, `B₂`
/// orthonormal bases of their ranges, the result is
/// `(B₂* π_Φ B₁, B₁* π_φ B₁, B₁* √Δ₁ V_Φ, B₂* W_Φ C*)`. Without `C` the
/// compressed quintuple factorizes `Φ_{√Δ}`, which is only equivalent to `Ψ`.
/// When a kernel is trivial the corresponding basis is the identity.
pub fn reconstruct_stinespring<R: Real>(
    q: &ModuleStinespring<R>,
    d: &RNDerivative<R>,
    tol: &TolerancePolicy<R>,
) -> Result<Reconstruction<R>> {
    let (dh, dk) = (q.d_h(), q.d_k());
    if d.delta1.shape() != (dh, dh) || d.delta2.shape() != (dk, dk) {
        return Err(Error::InvalidDerivative(format!(
            "Δ on C^{} ⊕ C^{}, dilation on C^{dh} ⊕ C^{dk}",
            d.delta1.nrows(),
            d.delta2.nrows()
        )));
    }
    let delta = d.delta();
    let bound = R::one() + R::lit(RN_RESIDUAL_REL).max(tol.eq_abs_tol);
    if !delta.is_in_commutant(q, tol) || !delta.is_psd(tol) || op_norm(&d.delta1).max(op_norm(&d.delta2)) > bound {
        return Err(Error::InvalidDerivative(format!(
            "Δ is not in [0, I] of the commutant (residual {:e})",
            delta.residual(q).as_f64()
        )));
    }
    let mut warnings = Vec::new();
    let b1 = range_basis(&d.delta1, "Δ₁", tol, &mut warnings);
    let b2 = range_basis(&d.delta2, "Δ₂", tol, &mut warnings);
    let root = hermitian_sqrt(&d.delta1, tol).map_err(|e| Error::InvalidDerivative(e.to_string()))?;

    let b1_star = b1.adjoint();
    let b2_star = b2.adjoint();
    let pi_phi: Vec<_> = q.pi_phi().pi_images().iter().map(|a| &b1_star * a * &b1).collect();
    let v = &b1_star * &root * q.v();
    let pi_x: Vec<_> = q.pi_x_images().iter().map(|x| &b2_star * x * &b1).collect();
    let w = &b2_star * q.w();
    let phi_part = PhiStinespring::new(q.pi_phi().m(), pi_phi, v)?;
    let compressed = ModuleStinespring::from_parts(q.module(), phi_part, pi_x, w)?;

    let sqrt_delta = delta.sqrt(tol).map_err(|e| Error::InvalidDerivative(e.to_string()))?;
    let phi_root = compress(q, &sqrt_delta, tol).map_err(|e| Error::InvalidDerivative(e.to_string()))?;
    let connecting = connecting_partial_isometry(d.psi(), &phi_root, tol)
        .map_err(|_| Error::InvalidDerivative("Φ_{√Δ} is not equivalent to Ψ".into()))?;
    let w = compressed.w() * connecting.adjoint();
    let quintuple = ModuleStinespring::from_parts(
        q.module(),
        compressed.pi_phi().clone(),
        compressed.pi_x_images().to_vec(),
        w,
    )?;
    Ok(Reconstruction {
        quintuple,
        connecting,
        warnings,
    })
}

/// Orthonormal basis of the range of a PSD matrix: the complement of
/// `kernel_projector`. Borderline eigenvalues are reported in `warnings`.
fn range_basis<R: Real>(m: &CMat<R>, name: &str, tol: &TolerancePolicy<R>, warnings: &mut Vec<String>) -> CMat<R> {
    let n = m.nrows();
    let eig = eigh(m);
    let cut = kernel_cut(&eig.values, tol);
    let ten = R::lit(10.0);
    for &l in &eig.values {
        if cut > R::zero() && l > cut / ten && l < cut * ten {
            warnings.push(format!(
                "{name} eigenvalue {:e} is near the kernel threshold {:e}",
                l.as_f64(),
                cut.as_f64()
            ));
        }
    }
    let rank = eig.values.iter().filter(|&&l| l > cut).count();
    if rank == n {
        return identity(n);
    }
    let mut cols = CMat::zeros(n, rank);
    for j in 0..rank {
        cols.set_column(j, &eig.vectors.column(j));
    }
    orthonormal_span(&cols, tol)
}

/// Result of [`is_pure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PurityReport {
    pub pure: bool,
    pub commutant_dim: usize,
}

/// `Φ` is pure exactly when `π_Φ(X)' = C I`.
pub fn is_pure<R: Real>(map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> Result<PurityReport> {
    if map.max_abs() <= tol.eq_abs_tol {
        return Err(Error::ZeroMap);
    }
    let q = construct(map, tol)?;
    let commutant_dim = commutant(&q, tol).dim();
    Ok(PurityReport {
        pure: commutant_dim == 1,
        commutant_dim,
    })
}
