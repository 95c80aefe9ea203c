// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! The Hilbert C*-module `X = M_{k×m}(C)` over `A = M_m(C)`.
//!
//! The inner product is `<x, y> = x* y` and `A` acts on the right by matrix
//! multiplication. Matrix units are enumerated row-major: `E^(11), E^(12), …`.

use crate::error::{Error, Result};
use crate::numerics::{hcat, matrix_unit, rank, CMat, TolerancePolicy};
use crate::scalar::Real;

/// `A = M_m(C)`, unital with the identity matrix as unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MatrixAlgebra {
    m: usize,
}

impl MatrixAlgebra {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::ShapeMismatch("algebra size must be at least 1".into()));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn unit<R: Real>(&self) -> AlgebraElement<R> {
        AlgebraElement {
            algebra: *self,
            value: CMat::identity(self.m, self.m),
        }
    }

    /// Matrix unit `E_st` (0-based indices).
    pub fn matrix_unit<R: Real>(&self, s: usize, t: usize) -> AlgebraElement<R> {
        AlgebraElement {
            algebra: *self,
            value: matrix_unit(self.m, self.m, s, t),
        }
    }
}

/// `X = M_{k×m}(C)` as a right Hilbert `M_m(C)`-module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HilbertModule {
    k: usize,
    m: usize,
}

impl HilbertModule {
    pub fn new(k: usize, m: usize) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::ShapeMismatch(format!(
                "module M_{{{k}x{m}}} needs positive sizes"
            )));
        }
        Ok(Self { k, m })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of matrix units, `k * m`.
    pub fn dim(&self) -> usize {
        self.k * self.m
    }

    pub fn algebra(&self) -> MatrixAlgebra {
        MatrixAlgebra { m: self.m }
    }

    /// Row-major position of `E^(rs)` (0-based `r`, `s`).
    pub fn basis_index(&self, r: usize, s: usize) -> usize {
        debug_assert!(r < self.k && s < self.m);
        r * self.m + s
    }

    /// Inverse of [`basis_index`](Self::basis_index).
    pub fn basis_pair(&self, index: usize) -> (usize, usize) {
        (index / self.m, index % self.m)
    }

    pub fn unit<R: Real>(&self, r: usize, s: usize) -> ModuleElement<R> {
        ModuleElement {
            module: *self,
            value: matrix_unit(self.k, self.m, r, s),
        }
    }

    pub fn element<R: Real>(&self, value: CMat<R>) -> Result<ModuleElement<R>> {
        ModuleElement::new(*self, value)
    }
}

/// An element of `X`: a `k × m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleElement<R: Real> {
    module: HilbertModule,
    value: CMat<R>,
}

impl<R: Real> ModuleElement<R> {
    pub fn new(module: HilbertModule, value: CMat<R>) -> Result<Self> {
        if value.shape() != (module.k, module.m) {
            return Err(Error::ModuleMismatch(format!(
                "element of shape {:?} in M_{{{}x{}}}",
                value.shape(),
                module.k,
                module.m
            )));
        }
        Ok(Self { module, value })
    }

    pub fn module(&self) -> HilbertModule {
        self.module
    }

    pub fn value(&self) -> &CMat<R> {
        &self.value
    }

    pub fn into_value(self) -> CMat<R> {
        self.value
    }

    /// Module norm `||<x, x>||^{1/2}`.
    pub fn norm(&self) -> R {
        let inner = self.value.adjoint() * &self.value;
        crate::numerics::op_norm(&inner).sqrt()
    }
}

/// An element of `A`: an `m × m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement<R: Real> {
    algebra: MatrixAlgebra,
    value: CMat<R>,
}

impl<R: Real> AlgebraElement<R> {
    pub fn new(algebra: MatrixAlgebra, value: CMat<R>) -> Result<Self> {
        if value.shape() != (algebra.m, algebra.m) {
            return Err(Error::ModuleMismatch(format!(
                "element of shape {:?} in M_{}",
                value.shape(),
                algebra.m
            )));
        }
        Ok(Self { algebra, value })
    }

    pub fn algebra(&self) -> MatrixAlgebra {
        self.algebra
    }

    pub fn value(&self) -> &CMat<R> {
        &self.value
    }

    pub fn into_value(self) -> CMat<R> {
        self.value
    }
}

/// `<x, y> = x* y`.
pub fn module_inner<R: Real>(x: &ModuleElement<R>, y: &ModuleElement<R>) -> Result<AlgebraElement<R>> {
    if x.module != y.module {
        return Err(Error::ModuleMismatch("inner product across modules".into()));
    }
    Ok(AlgebraElement {
        algebra: x.module.algebra(),
        value: x.value.adjoint() * &y.value,
    })
}

/// `x · a`.
pub fn right_action<R: Real>(x: &ModuleElement<R>, a: &AlgebraElement<R>) -> Result<ModuleElement<R>> {
    if x.module.m != a.algebra.m {
        return Err(Error::ModuleMismatch(format!(
            "M_{{{}x{}}} acted on by M_{}",
            x.module.k, x.module.m, a.algebra.m
        )));
    }
    Ok(ModuleElement {
        module: x.module,
        value: &x.value * &a.value,
    })
}

/// Matrix units of `X` in row-major order.
pub fn matrix_unit_basis<R: Real>(module: &HilbertModule) -> Vec<ModuleElement<R>> {
    (0..module.dim())
        .map(|i| {
            let (r, s) = module.basis_pair(i);
            module.unit(r, s)
        })
        .collect()
}

/// Whether the inner products of matrix units span all of `A`.
pub fn fullness_check<R: Real>(module: &HilbertModule, tol: &TolerancePolicy<R>) -> bool {
    let basis = matrix_unit_basis::<R>(module);
    let m = module.m;
    let mut columns = Vec::with_capacity(basis.len() * basis.len());
    for x in &basis {
        for y in &basis {
            let a = module_inner(x, y).expect("same module").into_value();
            // vectorize the m x m value as one column of length m^2
            columns.push(CMat::from_iterator(m * m, 1, a.transpose().iter().copied()));
        }
    }
    rank(&hcat(m * m, &columns), tol) == m * m
}
