// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Completely positive maps on `A = M_m(C)` and on the module `X`.
//!
//! A [`CPMap`] `φ: A -> L(H)` is stored by its values on the matrix units
//! `E_st`; a [`ModuleCPMap`] `Φ: X -> L(H, K)` by its values on the module
//! units `E^(rs)`. Both are linear, so these tables determine them.

use crate::error::{Error, Result};
use crate::modspace::HilbertModule;
use crate::numerics::{
    gram_factor, hcat, identity, kron, matrix_unit, max_abs, max_abs_diff, min_eigenvalue, op_norm, rank, scale, vcat,
    CMat, GramFactor, TolerancePolicy,
};
use crate::scalar::{Real, C};

/// `φ: M_m(C) -> L(C^p)` given by `φ(E_st)` in row-major `(s, t)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CPMap<R: Real> {
    m: usize,
    p: usize,
    images: Vec<CMat<R>>,
}

impl<R: Real> CPMap<R> {
    pub fn new(m: usize, p: usize, images: Vec<CMat<R>>) -> Result<Self> {
        if m == 0 {
            return Err(Error::ShapeMismatch("algebra size must be at least 1".into()));
        }
        if images.len() != m * m {
            return Err(Error::ShapeMismatch(format!(
                "expected {} images, got {}",
                m * m,
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|x| x.shape() != (p, p)) {
            return Err(Error::ShapeMismatch(format!(
                "image of shape {:?}, expected {p}x{p}",
                bad.shape()
            )));
        }
        Ok(Self { m, p, images })
    }

    pub fn zero(m: usize, p: usize) -> Self {
        Self {
            m,
            p,
            images: vec![CMat::zeros(p, p); m * m],
        }
    }

    /// Identity map on `M_m`.
    pub fn identity(m: usize) -> Self {
        let images = (0..m * m).map(|i| matrix_unit(m, m, i / m, i % m)).collect();
        Self { m, p: m, images }
    }

    /// Transpose map on `M_m`, positive but not completely positive for `m ≥ 2`.
    pub fn transpose(m: usize) -> Self {
        let images = (0..m * m).map(|i| matrix_unit(m, m, i % m, i / m)).collect();
        Self { m, p: m, images }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn images(&self) -> &[CMat<R>] {
        &self.images
    }

    /// `φ(E_st)` (0-based).
    pub fn image(&self, s: usize, t: usize) -> &CMat<R> {
        &self.images[s * self.m + t]
    }

    /// `φ(a) = Σ a_st φ(E_st)`.
    pub fn eval(&self, a: &CMat<R>) -> CMat<R> {
        assert_eq!(a.shape(), (self.m, self.m), "argument outside M_m");
        let mut out = CMat::zeros(self.p, self.p);
        for s in 0..self.m {
            for t in 0..self.m {
                out += self.image(s, t) * a[(s, t)];
            }
        }
        out
    }

    pub fn scaled(&self, factor: R) -> Self {
        Self {
            m: self.m,
            p: self.p,
            images: self.images.iter().map(|x| scale(x, factor)).collect(),
        }
    }

    /// `self - other`; shapes must agree.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if (self.m, self.p) != (other.m, other.p) {
            return Err(Error::ShapeMismatch("difference of differently shaped maps".into()));
        }
        let images = self.images.iter().zip(&other.images).map(|(a, b)| a - b).collect();
        Ok(Self {
            m: self.m,
            p: self.p,
            images,
        })
    }

    /// Largest entrywise deviation between two maps on matrix units.
    pub fn max_deviation(&self, other: &Self) -> Result<R> {
        if (self.m, self.p) != (other.m, other.p) {
            return Err(Error::ShapeMismatch("comparing differently shaped maps".into()));
        }
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .fold(R::zero(), |acc, (a, b)| acc.max(max_abs_diff(a, b))))
    }
}

/// The block matrix `[φ(E_st)]_{s,t}` of size `mp × mp`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<R: Real>(CMat<R>);

impl<R: Real> ChoiMatrix<R> {
    pub fn value(&self) -> &CMat<R> {
        &self.0
    }

    pub fn into_value(self) -> CMat<R> {
        self.0
    }

    pub fn min_eigenvalue(&self) -> R {
        min_eigenvalue(&self.0)
    }
}

pub fn choi<R: Real>(phi: &CPMap<R>) -> ChoiMatrix<R> {
    let (m, p) = (phi.m, phi.p);
    let mut out = CMat::zeros(m * p, m * p);
    for s in 0..m {
        for t in 0..m {
            out.view_mut((s * p, t * p), (p, p)).copy_from(phi.image(s, t));
        }
    }
    ChoiMatrix(out)
}

/// Whether the Choi matrix is PSD within `psd_tol` (relative to its norm).
pub fn is_completely_positive<R: Real>(phi: &CPMap<R>, tol: &TolerancePolicy<R>) -> bool {
    let c = choi(phi).into_value();
    if crate::numerics::hermitian_defect(&c) > tol.eq_abs_tol {
        return false;
    }
    min_eigenvalue(&c) >= -tol.psd_tol * op_norm(&c)
}

/// `Φ: M_{k×m}(C) -> L(C^p, C^q)` given by `Φ(E^(rs))` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleCPMap<R: Real> {
    module: HilbertModule,
    p: usize,
    q: usize,
    images: Vec<CMat<R>>,
}

impl<R: Real> ModuleCPMap<R> {
    /// Candidate map from its basis images. Complete positivity is not
    /// checked here; see [`validate_module_cp`].
    pub fn new(module: HilbertModule, p: usize, q: usize, images: Vec<CMat<R>>) -> Result<Self> {
        if images.len() != module.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} basis images, got {}",
                module.dim(),
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|x| x.shape() != (q, p)) {
            return Err(Error::ShapeMismatch(format!(
                "image of shape {:?}, expected {q}x{p}",
                bad.shape()
            )));
        }
        Ok(Self { module, p, q, images })
    }

    pub fn zero(module: HilbertModule, p: usize, q: usize) -> Self {
        Self {
            module,
            p,
            q,
            images: vec![CMat::zeros(q, p); module.dim()],
        }
    }

    /// `x ↦ x` on `M_{k×m}` with `H = C^m`, `K = C^k`.
    pub fn identity(module: HilbertModule) -> Self {
        let (k, m) = (module.k(), module.m());
        let images = (0..module.dim())
            .map(|i| {
                let (r, s) = module.basis_pair(i);
                matrix_unit(k, m, r, s)
            })
            .collect();
        Self {
            module,
            p: m,
            q: k,
            images,
        }
    }

    /// `x ↦ x ⊗ I_n`, the `n`-fold amplification of the identity map.
    pub fn amplified_identity(module: HilbertModule, n: usize) -> Self {
        let id = identity::<R>(n);
        let base = Self::identity(module);
        let images = base.images.iter().map(|x| kron(&id, x)).collect();
        Self {
            module,
            p: module.m() * n,
            q: module.k() * n,
            images,
        }
    }

    pub fn module(&self) -> HilbertModule {
        self.module
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn images(&self) -> &[CMat<R>] {
        &self.images
    }

    /// `Φ(E^(rs))` (0-based).
    pub fn image(&self, r: usize, s: usize) -> &CMat<R> {
        &self.images[self.module.basis_index(r, s)]
    }

    /// `Φ(x) = Σ x_rs Φ(E^(rs))`.
    pub fn eval(&self, x: &CMat<R>) -> CMat<R> {
        assert_eq!(x.shape(), (self.module.k(), self.module.m()), "argument outside X");
        let mut out = CMat::zeros(self.q, self.p);
        for (i, img) in self.images.iter().enumerate() {
            let (r, s) = self.module.basis_pair(i);
            out += img * x[(r, s)];
        }
        out
    }

    pub fn scaled(&self, factor: R) -> Self {
        self.map_images(|x| scale(x, factor))
    }

    /// `x ↦ U Φ(x)` for an operator `U` on `K`.
    pub fn compose_left(&self, u: &CMat<R>) -> Result<Self> {
        if u.shape() != (self.q, self.q) {
            return Err(Error::ShapeMismatch(format!(
                "left factor {:?} on K = C^{}",
                u.shape(),
                self.q
            )));
        }
        Ok(self.map_images(|x| u * x))
    }

    fn map_images(&self, f: impl Fn(&CMat<R>) -> CMat<R>) -> Self {
        Self {
            module: self.module,
            p: self.p,
            q: self.q,
            images: self.images.iter().map(f).collect(),
        }
    }

    /// All vectors `Φ(E_i) e_j` as columns of a `q × (km·p)` matrix.
    pub fn spanning_columns(&self) -> CMat<R> {
        hcat(self.q, &self.images)
    }

    /// Largest entry over all basis images.
    pub fn max_abs(&self) -> R {
        self.images.iter().fold(R::zero(), |acc, x| acc.max(max_abs(x)))
    }

    /// Largest entrywise deviation between two maps on basis elements.
    pub fn max_deviation(&self, other: &Self) -> Result<R> {
        self.check_same_shape(other)?;
        Ok(self
            .images
            .iter()
            .zip(&other.images)
            .fold(R::zero(), |acc, (a, b)| acc.max(max_abs_diff(a, b))))
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.module != other.module || self.p != other.p || self.q != other.q {
            return Err(Error::ShapeMismatch(format!(
                "maps on M_{{{}x{}}} into L(C^{}, C^{}) vs M_{{{}x{}}} into L(C^{}, C^{})",
                self.module.k(),
                self.module.m(),
                self.p,
                self.q,
                other.module.k(),
                other.module.m(),
                other.p,
                other.q
            )));
        }
        Ok(())
    }
}

/// Underlying map `φ(E_st) := Φ(E^(1s))* Φ(E^(1t))` and the consistency
/// residual `max ||Φ(x)*Φ(y) - φ(<x, y>)||` over all basis pairs.
///
/// Fails with [`Error::NotAModuleCPMap`] when the residual exceeds `eq_abs_tol`.
pub fn derive_underlying<R: Real>(map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> Result<(CPMap<R>, R)> {
    let (phi, residual) = underlying_with_residual(map);
    if residual > tol.eq_abs_tol {
        return Err(Error::NotAModuleCPMap(residual.as_f64()));
    }
    Ok((phi, residual))
}

pub(crate) fn underlying_with_residual<R: Real>(map: &ModuleCPMap<R>) -> (CPMap<R>, R) {
    let (k, m) = (map.module.k(), map.module.m());
    let images = (0..m * m)
        .map(|i| map.image(0, i / m).adjoint() * map.image(0, i % m))
        .collect();
    let phi = CPMap { m, p: map.p, images };
    let zero = CMat::zeros(map.p, map.p);
    let mut residual = R::zero();
    for r in 0..k {
        for s in 0..m {
            for r2 in 0..k {
                for t in 0..m {
                    let lhs = map.image(r, s).adjoint() * map.image(r2, t);
                    // <E^(rs), E^(r't)> = δ_rr' E_st
                    let rhs = if r == r2 { phi.image(s, t) } else { &zero };
                    residual = residual.max(max_abs_diff(&lhs, rhs));
                }
            }
        }
    }
    (phi, residual)
}

/// Verdict of [`validate_module_cp`].
#[derive(Debug, Clone)]
pub struct ValidationReport<R: Real> {
    pub is_valid: bool,
    pub phi: CPMap<R>,
    pub residual: R,
    pub choi_min_eigenvalue: R,
}

/// Checks that `Φ` admits a consistent, completely positive underlying map.
pub fn validate_module_cp<R: Real>(map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> ValidationReport<R> {
    let (phi, residual) = underlying_with_residual(map);
    let choi_min_eigenvalue = choi(&phi).min_eigenvalue();
    let is_valid = residual <= tol.eq_abs_tol && is_completely_positive(&phi, tol);
    ValidationReport {
        is_valid,
        phi,
        residual,
        choi_min_eigenvalue,
    }
}

/// `[Φ(X)H] = K`: the vectors `Φ(E_i) e_j` span the whole of `K`.
pub fn is_nondegenerate_map<R: Real>(map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> bool {
    rank(&map.spanning_columns(), tol) == map.q
}

/// Minimal Stinespring dilation `φ(a) = V* π(a) V` of a CP map on `M_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiStinespring<R: Real> {
    m: usize,
    pi_images: Vec<CMat<R>>,
    v: CMat<R>,
}

impl<R: Real> PhiStinespring<R> {
    pub fn new(m: usize, pi_images: Vec<CMat<R>>, v: CMat<R>) -> Result<Self> {
        let d = v.nrows();
        if pi_images.len() != m * m || pi_images.iter().any(|x| x.shape() != (d, d)) {
            return Err(Error::ShapeMismatch("representation images do not match V".into()));
        }
        Ok(Self { m, pi_images, v })
    }

    /// `dim H_φ`.
    pub fn d(&self) -> usize {
        self.v.nrows()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.v.ncols()
    }

    pub fn pi_images(&self) -> &[CMat<R>] {
        &self.pi_images
    }

    /// `π_φ(E_st)` (0-based).
    pub fn pi(&self, s: usize, t: usize) -> &CMat<R> {
        &self.pi_images[s * self.m + t]
    }

    /// `π_φ(a)` for arbitrary `a ∈ M_m`.
    pub fn pi_of(&self, a: &CMat<R>) -> CMat<R> {
        let d = self.d();
        let mut out = CMat::zeros(d, d);
        for s in 0..self.m {
            for t in 0..self.m {
                out += self.pi(s, t) * a[(s, t)];
            }
        }
        out
    }

    pub fn v(&self) -> &CMat<R> {
        &self.v
    }

    /// `V* π(E_st) V` on all matrix units.
    pub fn reconstructed(&self) -> CPMap<R> {
        let images = self
            .pi_images
            .iter()
            .map(|pi| self.v.adjoint() * pi * &self.v)
            .collect();
        CPMap {
            m: self.m,
            p: self.p(),
            images,
        }
    }

    /// The vectors `π(E_st) V e_u` as columns, ordered by `(s, t, u)`.
    pub fn spanning_columns(&self) -> CMat<R> {
        let blocks: Vec<_> = self.pi_images.iter().map(|pi| pi * &self.v).collect();
        hcat(self.d(), &blocks)
    }

    /// Largest violation of the unital *-homomorphism laws on matrix units.
    pub fn homomorphism_defect(&self) -> R {
        let (m, d) = (self.m, self.d());
        let mut worst = R::zero();
        let zero = CMat::zeros(d, d);
        let mut sum = CMat::zeros(d, d);
        for s in 0..m {
            sum += self.pi(s, s);
            for t in 0..m {
                worst = worst.max(max_abs_diff(&self.pi(s, t).adjoint(), self.pi(t, s)));
                for u in 0..m {
                    for v in 0..m {
                        let prod = self.pi(s, t) * self.pi(u, v);
                        let expect = if t == u { self.pi(s, v) } else { &zero };
                        worst = worst.max(max_abs_diff(&prod, expect));
                    }
                }
            }
        }
        worst.max(max_abs_diff(&sum, &identity(d)))
    }
}

/// Gram factor of the Choi matrix together with the dilation built from it.
pub(crate) struct GnsParts<R: Real> {
    pub dilation: PhiStinespring<R>,
    /// `Choi = F* F` with `F` of full row rank `r`; `H_φ = C^m ⊗ C^r`.
    pub choi_factor: GramFactor<R>,
}

/// GNS construction of the minimal Stinespring dilation of `φ`.
///
/// The Gram form on `A ⊗ H`, `<E_st ⊗ e_u, E_s't' ⊗ e_v> = δ_ss' φ(E_tt')_uv`,
/// is `I_m ⊗ Choi(φ)`. Factoring `Choi = F* F` realizes the quotient as
/// `H_φ = C^m ⊗ C^r`, where `π_φ(a) = a ⊗ I_r` and `V e_u = Σ_s e_s ⊗ F e_(s,u)`.
pub fn gns_stinespring<R: Real>(phi: &CPMap<R>, tol: &TolerancePolicy<R>) -> Result<PhiStinespring<R>> {
    gns_parts(phi, tol).map(|parts| parts.dilation)
}

pub(crate) fn gns_parts<R: Real>(phi: &CPMap<R>, tol: &TolerancePolicy<R>) -> Result<GnsParts<R>> {
    let c = choi(phi).into_value();
    let factor = gram_factor(&c, tol).map_err(|e| match e {
        Error::NotPSD(l) => Error::NotCP(l),
        Error::NotHermitian(d) => Error::NotCP(d),
        other => other,
    })?;
    let (m, p, r) = (phi.m, phi.p, factor.rank());
    let id_r = identity::<R>(r);
    let pi_images = (0..m * m)
        .map(|i| kron(&matrix_unit::<R>(m, m, i / m, i % m), &id_r))
        .collect();
    let blocks: Vec<_> = (0..m).map(|s| factor.factor.columns(s * p, p).into_owned()).collect();
    let v = vcat(p, &blocks);
    Ok(GnsParts {
        dilation: PhiStinespring { m, pi_images, v },
        choi_factor: factor,
    })
}

/// Arveson compression `φ_T(a) = V* T π_φ(a) V` for `T` PSD in `π_φ(A)'`.
pub fn arveson_compress<R: Real>(
    dilation: &PhiStinespring<R>,
    t: &CMat<R>,
    tol: &TolerancePolicy<R>,
) -> Result<CPMap<R>> {
    let d = dilation.d();
    if t.shape() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "T of shape {:?} on H_φ of dimension {d}",
            t.shape()
        )));
    }
    let defect = dilation
        .pi_images
        .iter()
        .fold(R::zero(), |acc, pi| acc.max(max_abs_diff(&(t * pi), &(pi * t))));
    if defect > tol.eq_abs_tol {
        return Err(Error::NotInCommutant(defect.as_f64()));
    }
    let vt = dilation.v.adjoint() * t;
    let images = dilation.pi_images.iter().map(|pi| &vt * pi * &dilation.v).collect();
    Ok(CPMap {
        m: dilation.m,
        p: dilation.p(),
        images,
    })
}

/// Complex scalar helper for callers building maps by hand.
pub fn scalar<R: Real>(re: f64, im: f64) -> C<R> {
    C::new(R::lit(re), R::lit(im))
}
