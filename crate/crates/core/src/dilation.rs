// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Stinespring construction for module CP maps.
//!
//! For `Φ: X -> L(H, K)` with underlying `φ`, the construction yields
//! `(π_Φ, H_Φ, K_Φ, V_Φ, W_Φ)` with `Φ(x) = W_Φ* π_Φ(x) V_Φ`, where
//! `H_Φ = H_φ` carries the GNS representation of `φ`, `K_Φ ≅ [Φ(X)H]`, and
//! `W_Φ: K -> K_Φ` is a coisometry.

use crate::cpmaps::{gns_parts, validate_module_cp, ModuleCPMap, PhiStinespring};
use crate::error::{Error, Result};
use crate::modspace::HilbertModule;
use crate::numerics::{
    hcat, identity, kron, least_squares_intertwiner, matrix_unit, max_abs_diff, rank, unitarity_defect, CMat,
    TolerancePolicy,
};
use crate::scalar::Real;

/// The quintuple `(π_Φ, H_Φ, K_Φ, V_Φ, W_Φ)` together with `π_φ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleStinespring<R: Real> {
    module: HilbertModule,
    pi_phi: PhiStinespring<R>,
    pi_x: Vec<CMat<R>>,
    w: CMat<R>,
}

impl<R: Real> ModuleStinespring<R> {
    /// Assemble a quintuple from its parts. Only shapes are checked; use
    /// [`ModuleStinespring::invariants`] for the algebraic conditions.
    pub fn from_parts(
        module: HilbertModule,
        pi_phi: PhiStinespring<R>,
        pi_x: Vec<CMat<R>>,
        w: CMat<R>,
    ) -> Result<Self> {
        let (dh, dk) = (pi_phi.d(), w.nrows());
        if pi_phi.m() != module.m() {
            return Err(Error::ShapeMismatch("π_φ acts on a different algebra".into()));
        }
        if pi_x.len() != module.dim() || pi_x.iter().any(|x| x.shape() != (dk, dh)) {
            return Err(Error::ShapeMismatch(format!(
                "expected {} images of shape {dk}x{dh}",
                module.dim()
            )));
        }
        Ok(Self {
            module,
            pi_phi,
            pi_x,
            w,
        })
    }

    pub fn module(&self) -> HilbertModule {
        self.module
    }

    /// `dim H_Φ`.
    pub fn d_h(&self) -> usize {
        self.pi_phi.d()
    }

    /// `dim K_Φ`.
    pub fn d_k(&self) -> usize {
        self.w.nrows()
    }

    pub fn p(&self) -> usize {
        self.pi_phi.p()
    }

    pub fn q(&self) -> usize {
        self.w.ncols()
    }

    pub fn pi_phi(&self) -> &PhiStinespring<R> {
        &self.pi_phi
    }

    pub fn pi_x_images(&self) -> &[CMat<R>] {
        &self.pi_x
    }

    /// `π_Φ(E^(rs))` (0-based).
    pub fn pi_x(&self, r: usize, s: usize) -> &CMat<R> {
        &self.pi_x[self.module.basis_index(r, s)]
    }

    /// `π_Φ(x)` for arbitrary `x ∈ X`.
    pub fn pi_x_of(&self, x: &CMat<R>) -> CMat<R> {
        let mut out = CMat::zeros(self.d_k(), self.d_h());
        for (i, img) in self.pi_x.iter().enumerate() {
            let (r, s) = self.module.basis_pair(i);
            out += img * x[(r, s)];
        }
        out
    }

    /// `V_Φ: H -> H_Φ`.
    pub fn v(&self) -> &CMat<R> {
        self.pi_phi.v()
    }

    /// `W_Φ: K -> K_Φ`.
    pub fn w(&self) -> &CMat<R> {
        &self.w
    }

    /// `x ↦ W* π_Φ(x) V` on basis elements.
    pub fn factorized(&self) -> ModuleCPMap<R> {
        let w_star = self.w.adjoint();
        let images = self.pi_x.iter().map(|pi| &w_star * pi * self.v()).collect();
        ModuleCPMap::new(self.module, self.p(), self.q(), images).expect("consistent shapes")
    }

    /// Vectors `π_φ(E_st) V e_u` spanning `H_Φ` for a minimal dilation.
    pub fn h_spanning_columns(&self) -> CMat<R> {
        self.pi_phi.spanning_columns()
    }

    /// Vectors `π_Φ(E^(rs)) V e_u` spanning `K_Φ` for a minimal dilation.
    pub fn k_spanning_columns(&self) -> CMat<R> {
        let blocks: Vec<_> = self.pi_x.iter().map(|pi| pi * self.v()).collect();
        hcat(self.d_k(), &blocks)
    }

    /// Whether both minimality spans are full.
    pub fn is_minimal(&self, tol: &TolerancePolicy<R>) -> bool {
        rank(&self.h_spanning_columns(), tol) == self.d_h() && rank(&self.k_spanning_columns(), tol) == self.d_k()
    }

    /// Residuals of every structural invariant of the quintuple.
    pub fn invariants(&self, map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> DilationInvariants<R> {
        let w_defect = max_abs_diff(&(&self.w * self.w.adjoint()), &identity(self.d_k()));
        let factorization = self
            .factorized()
            .max_deviation(map)
            .unwrap_or_else(|_| R::max_value().unwrap_or_else(R::one));
        DilationInvariants {
            representation: representation_defect(self.module, &self.pi_x, &self.pi_phi),
            homomorphism: self.pi_phi.homomorphism_defect(),
            coisometry: w_defect,
            factorization,
            minimal_h: rank(&self.h_spanning_columns(), tol) == self.d_h(),
            minimal_k: rank(&self.k_spanning_columns(), tol) == self.d_k(),
            nondegenerate: is_nondegenerate_representation(&self.pi_x, self.d_h(), self.d_k(), tol),
        }
    }
}

/// Residuals and span verdicts of a quintuple (see [`ModuleStinespring::invariants`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationInvariants<R> {
    /// `max |π(x)* π(y) - π_φ(<x, y>)|` over basis pairs.
    pub representation: R,
    /// Deviation of `π_φ` from a unital *-homomorphism.
    pub homomorphism: R,
    /// `max |W W* - I|`.
    pub coisometry: R,
    /// `max |Φ(x) - W* π(x) V|` over basis elements.
    pub factorization: R,
    pub minimal_h: bool,
    pub minimal_k: bool,
    pub nondegenerate: bool,
}

impl<R: Real> DilationInvariants<R> {
    pub fn max_residual(&self) -> R {
        self.representation
            .max(self.homomorphism)
            .max(self.coisometry)
            .max(self.factorization)
    }

    pub fn all_hold(&self, tol: &TolerancePolicy<R>) -> bool {
        self.max_residual() <= tol.eq_abs_tol && self.minimal_h && self.minimal_k && self.nondegenerate
    }
}

/// Stinespring construction of a module CP map.
///
/// `H_Φ`, `π_φ`, `V_Φ` come from the GNS dilation of the underlying map,
/// realized as `C^m ⊗ C^r` with `r = rank Choi(φ)`. The Gram form on `X ⊗ H`,
/// `<E^(rs) ⊗ e_u, E^(r't) ⊗ e_v> = δ_rr' φ(E_st)_uv`, is `I_k ⊗ Choi(φ)`, so
/// the same factor gives `K_Φ = C^k ⊗ C^r` with `π_Φ(x) = x ⊗ I_r`. `W_Φ*`
/// sends the class of `x ⊗ h` to `Φ(x) h`.
pub fn construct<R: Real>(map: &ModuleCPMap<R>, tol: &TolerancePolicy<R>) -> Result<ModuleStinespring<R>> {
    let report = validate_module_cp(map, tol);
    if !report.is_valid {
        return Err(Error::NotAModuleCPMap(report.residual.as_f64()));
    }
    let parts = gns_parts(&report.phi, tol)?;
    let module = map.module();
    let (k, m, q) = (module.k(), module.m(), map.q());
    let r = parts.choi_factor.rank();
    let id_r = identity::<R>(r);
    let pi_x = (0..module.dim())
        .map(|i| {
            let (a, b) = module.basis_pair(i);
            kron(&matrix_unit::<R>(k, m, a, b), &id_r)
        })
        .collect();
    // W* = [F_1 F⁺, …, F_k F⁺] with F_a = [Φ(E^(a1)) … Φ(E^(am))]
    let blocks: Vec<_> = (0..k)
        .map(|a| {
            let row: Vec<_> = (0..m).map(|b| map.image(a, b).clone()).collect();
            hcat(q, &row) * &parts.choi_factor.pinv
        })
        .collect();
    let w = hcat(q, &blocks).adjoint();
    Ok(ModuleStinespring {
        module,
        pi_phi: parts.dilation,
        pi_x,
        w,
    })
}

pub(crate) fn representation_defect<R: Real>(module: HilbertModule, pi_x: &[CMat<R>], pi_phi: &PhiStinespring<R>) -> R {
    let (k, m) = (module.k(), module.m());
    let d = pi_phi.d();
    let zero = CMat::zeros(d, d);
    let mut worst = R::zero();
    for r in 0..k {
        for s in 0..m {
            for r2 in 0..k {
                for t in 0..m {
                    let lhs = pi_x[module.basis_index(r, s)].adjoint() * &pi_x[module.basis_index(r2, t)];
                    let rhs = if r == r2 { pi_phi.pi(s, t) } else { &zero };
                    if lhs.shape() != rhs.shape() {
                        return R::max_value().unwrap_or_else(R::one);
                    }
                    worst = worst.max(max_abs_diff(&lhs, rhs));
                }
            }
        }
    }
    worst
}

/// `π_X(x)* π_X(y) = π_φ(<x, y>)` on all basis pairs, within `eq_abs_tol`.
pub fn check_representation<R: Real>(
    module: HilbertModule,
    pi_x: &[CMat<R>],
    pi_phi: &PhiStinespring<R>,
    tol: &TolerancePolicy<R>,
) -> bool {
    pi_x.len() == module.dim() && representation_defect(module, pi_x, pi_phi) <= tol.eq_abs_tol
}

/// `[π(X) H] = K` and `[π(X)* K] = H` for images of shape `d_k × d_h`.
pub fn is_nondegenerate_representation<R: Real>(
    pi_x: &[CMat<R>],
    d_h: usize,
    d_k: usize,
    tol: &TolerancePolicy<R>,
) -> bool {
    if pi_x.iter().any(|x| x.shape() != (d_k, d_h)) {
        return false;
    }
    let forward = hcat(d_k, pi_x);
    let adjoints: Vec<_> = pi_x.iter().map(|x| x.adjoint()).collect();
    let backward = hcat(d_h, &adjoints);
    rank(&forward, tol) == d_k && rank(&backward, tol) == d_h
}

/// Witness of [`quintuples_unitarily_equivalent`].
#[derive(Debug, Clone)]
pub struct UnitaryEquivalenceWitness<R: Real> {
    /// `U₁: H_Φ -> H'`.
    pub u1: CMat<R>,
    /// `U₂: K_Φ -> K'`.
    pub u2: CMat<R>,
    /// Largest residual among the conditions entering the verdict.
    pub max_residual: R,
    /// `max |U₂ W - W'|`. Zero only when the two factorized maps coincide;
    /// for distinct equivalent maps `W` differs by the connecting partial
    /// isometry, which is reported in `connecting`.
    pub w_residual: R,
    /// `W'* U₂ W`, the partial isometry on `K` carrying the first factorized
    /// map onto the second.
    pub connecting: CMat<R>,
}

/// Unitary equivalence of two minimal quintuples over the same `X`, `H`, `K`.
///
/// `U₁` and `U₂` are the least-squares intertwiners of the canonical spanning
/// sets `{π_φ(E_st) V e_u}` and `{π_Φ(E^(rs)) V e_u}`. The verdict requires
/// equal dimensions, unitary `U₁` and `U₂`, `U₁ V = V'`, and
/// `U₂ π(x) = π'(x) U₁` on all basis elements, each within `eq_abs_tol`.
pub fn quintuples_unitarily_equivalent<R: Real>(
    first: &ModuleStinespring<R>,
    second: &ModuleStinespring<R>,
    tol: &TolerancePolicy<R>,
) -> Result<(bool, UnitaryEquivalenceWitness<R>)> {
    if first.module != second.module || first.p() != second.p() || first.q() != second.q() {
        return Err(Error::ShapeMismatch("quintuples over different X, H or K".into()));
    }
    for (name, qt) in [("first", first), ("second", second)] {
        if !qt.is_minimal(tol) {
            return Err(Error::NotMinimal(format!("{name} quintuple")));
        }
    }
    let u1 = least_squares_intertwiner(&first.h_spanning_columns(), &second.h_spanning_columns(), tol)?;
    let u2 = least_squares_intertwiner(&first.k_spanning_columns(), &second.k_spanning_columns(), tol)?;
    let dims_match = first.d_h() == second.d_h() && first.d_k() == second.d_k();
    let (u1, r1) = (u1.map, u1.residual);
    let (u2, r2) = (u2.map, u2.residual);

    let worst = R::max_value().unwrap_or_else(R::one);
    let mut max_residual = r1.max(r2);
    let mut w_residual = worst;
    if dims_match {
        max_residual = max_residual
            .max(unitarity_defect(&u1))
            .max(unitarity_defect(&u2))
            .max(max_abs_diff(&(&u1 * first.v()), second.v()));
        for (a, b) in first.pi_x.iter().zip(&second.pi_x) {
            max_residual = max_residual.max(max_abs_diff(&(&u2 * a), &(b * &u1)));
        }
        w_residual = max_abs_diff(&(&u2 * first.w()), second.w());
    } else {
        max_residual = worst;
    }
    let connecting = second.w().adjoint() * &u2 * first.w();
    let verdict = dims_match && max_residual <= tol.eq_abs_tol;
    Ok((
        verdict,
        UnitaryEquivalenceWitness {
            u1,
            u2,
            max_residual,
            w_residual,
            connecting,
        },
    ))
}
