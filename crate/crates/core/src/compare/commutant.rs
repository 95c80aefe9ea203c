// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use crate::cpmaps::ModuleCPMap;
use crate::dilation::ModuleStinespring;
use crate::error::{Error, Result};
use crate::numerics::{
    common_null_space, hcat, hermitian_defect, hermitian_sqrt, identity, kron, least_squares_intertwiner, max_abs,
    max_abs_diff, min_eigenvalue, scale, CMat, TolerancePolicy,
};
use crate::scalar::{Real, C};

/// A pair `T ⊕ S` on `H_Φ ⊕ K_Φ` with `π(x) T = S π(x)` and `π(x)* S = T π(x)*`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutantElement<R: Real> {
    pub t: CMat<R>,
    pub s: CMat<R>,
}

impl<R: Real> CommutantElement<R> {
    pub fn new(t: CMat<R>, s: CMat<R>) -> Self {
        Self { t, s }
    }

    /// `I ⊕ I` for the given quintuple.
    pub fn identity(q: &ModuleStinespring<R>) -> Self {
        Self::new(identity(q.d_h()), identity(q.d_k()))
    }

    pub fn scaled(&self, factor: R) -> Self {
        Self::new(scale(&self.t, factor), scale(&self.s, factor))
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.t.adjoint(), self.s.adjoint())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(&self.t * &other.t, &self.s * &other.s)
    }

    /// Largest violation of the two intertwining relations over basis elements.
    /// Infinite when the shapes do not fit `q`.
    pub fn residual(&self, q: &ModuleStinespring<R>) -> R {
        if self.t.shape() != (q.d_h(), q.d_h()) || self.s.shape() != (q.d_k(), q.d_k()) {
            return R::max_value().unwrap_or_else(R::one);
        }
        q.pi_x_images().iter().fold(R::zero(), |acc, pi| {
            let a = max_abs_diff(&(pi * &self.t), &(&self.s * pi));
            let b = max_abs_diff(&(pi.adjoint() * &self.s), &(&self.t * pi.adjoint()));
            acc.max(a).max(b)
        })
    }

    pub fn is_in_commutant(&self, q: &ModuleStinespring<R>, tol: &TolerancePolicy<R>) -> bool {
        self.residual(q) <= tol.eq_abs_tol * R::one().max(self.max_abs())
    }

    /// `T ⊕ S ≥ 0`.
    pub fn is_psd(&self, tol: &TolerancePolicy<R>) -> bool {
        [&self.t, &self.s].iter().all(|m| {
            hermitian_defect(m) <= tol.eq_abs_tol && min_eigenvalue(m) >= -tol.psd_tol * R::one().max(max_abs(m))
        })
    }

    /// `0 ≤ T ⊕ S ≤ I`.
    pub fn is_contraction(&self, tol: &TolerancePolicy<R>) -> bool {
        let gap = Self::new(
            identity::<R>(self.t.nrows()) - &self.t,
            identity::<R>(self.s.nrows()) - &self.s,
        );
        self.is_psd(tol) && gap.is_psd(tol)
    }

    /// `√T ⊕ √S` for a PSD element.
    pub fn sqrt(&self, tol: &TolerancePolicy<R>) -> Result<Self> {
        Ok(Self::new(hermitian_sqrt(&self.t, tol)?, hermitian_sqrt(&self.s, tol)?))
    }

    pub fn max_abs(&self) -> R {
        max_abs(&self.t).max(max_abs(&self.s))
    }

    /// `vec(T) ⊕ vec(S)`, column-major.
    fn to_vec(&self) -> Vec<C<R>> {
        self.t.iter().chain(self.s.iter()).copied().collect()
    }

    fn from_vec(d_h: usize, d_k: usize, v: &[C<R>]) -> Self {
        let (a, b) = v.split_at(d_h * d_h);
        Self::new(
            CMat::from_column_slice(d_h, d_h, a),
            CMat::from_column_slice(d_k, d_k, b),
        )
    }
}

/// Basis of `π_Φ(X)'`, orthonormal for `<E, F> = tr(T_E* T_F) + tr(S_E* S_F)`.
#[derive(Debug, Clone)]
pub struct CommutantBasis<R: Real> {
    d_h: usize,
    d_k: usize,
    elements: Vec<CommutantElement<R>>,
}

impl<R: Real> CommutantBasis<R> {
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[CommutantElement<R>] {
        &self.elements
    }

    pub fn d_h(&self) -> usize {
        self.d_h
    }

    pub fn d_k(&self) -> usize {
        self.d_k
    }

    /// Coordinates of the orthogonal projection of `e` onto the span.
    pub fn coefficients(&self, e: &CommutantElement<R>) -> Vec<C<R>> {
        let v = e.to_vec();
        self.elements
            .iter()
            .map(|b| {
                b.to_vec()
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| x.conj() * y)
                    .fold(C::new(R::zero(), R::zero()), |a, z| a + z)
            })
            .collect()
    }

    /// `Σ c_i B_i`.
    pub fn combine(&self, coeffs: &[C<R>]) -> CommutantElement<R> {
        let mut t = CMat::zeros(self.d_h, self.d_h);
        let mut s = CMat::zeros(self.d_k, self.d_k);
        for (b, c) in self.elements.iter().zip(coeffs) {
            t += &b.t * *c;
            s += &b.s * *c;
        }
        CommutantElement::new(t, s)
    }

    /// Entrywise distance from `e` to the span.
    pub fn span_residual(&self, e: &CommutantElement<R>) -> R {
        let p = self.combine(&self.coefficients(e));
        max_abs_diff(&p.t, &e.t).max(max_abs_diff(&p.s, &e.s))
    }

    pub fn contains(&self, e: &CommutantElement<R>, tol: &TolerancePolicy<R>) -> bool {
        self.span_residual(e) <= tol.eq_abs_tol * R::one().max(e.max_abs())
    }
}

/// Basis of the commutant `π_Φ(X)'` as the null space of the linear system
/// `π(x) T - S π(x) = 0`, `π(x)* S - T π(x)* = 0` over basis elements `x`.
pub fn commutant<R: Real>(q: &ModuleStinespring<R>, tol: &TolerancePolicy<R>) -> CommutantBasis<R> {
    let (dh, dk) = (q.d_h(), q.d_k());
    let n = dh * dh + dk * dk;
    if n == 0 {
        return CommutantBasis {
            d_h: dh,
            d_k: dk,
            elements: Vec::new(),
        };
    }
    let (ih, ik) = (identity::<R>(dh), identity::<R>(dk));
    let mut blocks = Vec::with_capacity(2 * q.pi_x_images().len());
    for pi in q.pi_x_images() {
        let pi_star = pi.adjoint();
        // vec(A X B) = (Bᵀ ⊗ A) vec(X), column-major
        blocks.push(hcat(dk * dh, &[kron(&ih, pi), -kron(&pi.transpose(), &ik)]));
        blocks.push(hcat(dh * dk, &[-kron(&pi.conjugate(), &ih), kron(&ik, &pi_star)]));
    }
    let basis = common_null_space(n, &blocks, tol);
    let elements = basis
        .column_iter()
        .map(|col| CommutantElement::from_vec(dh, dk, col.as_slice()))
        .collect();
    CommutantBasis {
        d_h: dh,
        d_k: dk,
        elements,
    }
}

/// The unique `S` with `T ⊕ S ∈ π_Φ(X)'`, solved from `S π(x) v = π(x) T v`
/// on the spanning set `[π_Φ(X) H_Φ] = K_Φ`.
pub fn complete_commutant_element<R: Real>(
    q: &ModuleStinespring<R>,
    t: &CMat<R>,
    tol: &TolerancePolicy<R>,
) -> Result<CMat<R>> {
    let dh = q.d_h();
    if t.shape() != (dh, dh) {
        return Err(Error::DimensionMismatch(format!(
            "T of shape {:?} on H_Φ of dimension {dh}",
            t.shape()
        )));
    }
    let from = hcat(q.d_k(), q.pi_x_images());
    let targets: Vec<_> = q.pi_x_images().iter().map(|pi| pi * t).collect();
    let to = hcat(q.d_k(), &targets);
    let s = least_squares_intertwiner(&from, &to, tol)?.map;
    let e = CommutantElement::new(t.clone(), s);
    if !e.is_in_commutant(q, tol) {
        return Err(Error::NoCompatibleS(e.residual(q).as_f64()));
    }
    Ok(e.s)
}

/// `Φ_{T⊕S}(x) = W* √S π_Φ(x) √T V` for `T ⊕ S ≥ 0` in the commutant.
pub fn compress<R: Real>(
    q: &ModuleStinespring<R>,
    e: &CommutantElement<R>,
    tol: &TolerancePolicy<R>,
) -> Result<ModuleCPMap<R>> {
    if e.t.shape() != (q.d_h(), q.d_h()) || e.s.shape() != (q.d_k(), q.d_k()) {
        return Err(Error::DimensionMismatch(format!(
            "element on C^{} ⊕ C^{}, dilation on C^{} ⊕ C^{}",
            e.t.nrows(),
            e.s.nrows(),
            q.d_h(),
            q.d_k()
        )));
    }
    if !e.is_in_commutant(q, tol) {
        return Err(Error::NotInCommutant(e.residual(q).as_f64()));
    }
    let root = e.sqrt(tol)?;
    let left = q.w().adjoint() * &root.s;
    let right = &root.t * q.v();
    let images = q.pi_x_images().iter().map(|pi| &left * pi * &right).collect();
    ModuleCPMap::new(q.module(), q.p(), q.q(), images)
}

/// Stack of all basis elements as columns of `vec(T) ⊕ vec(S)`.
#[cfg(test)]
fn as_columns<R: Real>(b: &CommutantBasis<R>) -> CMat<R> {
    let n = b.d_h * b.d_h + b.d_k * b.d_k;
    let cols: Vec<_> = b
        .elements
        .iter()
        .map(|e| CMat::from_column_slice(n, 1, &e.to_vec()))
        .collect();
    hcat(n, &cols)
}
