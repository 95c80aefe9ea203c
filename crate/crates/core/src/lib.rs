// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Completely positive maps on the Hilbert C*-module `X = M_{k×m}(C)`.
//!
//! A map `Φ: X -> L(H, K)` is a module CP map when there is a completely
//! positive `φ` on `A = M_m(C)` with `Φ(x)* Φ(y) = φ(<x, y>)`. This crate
//! validates such maps, builds their Stinespring quintuples, and compares
//! them: equivalence with its partial isometry, domination, the commutant
//! of the dilation, compressions, the Radon-Nikodym derivative and purity.
//!
//! Everything is generic over the real field (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.
//!
//! ```
//! use cpmod::{compare, fixtures, Tolerance};
//!
//! let tol = Tolerance::default();
//! let phi = fixtures::flip_phi::<f64>();
//! let psi = fixtures::flip_psi::<f64>();
//! assert!(compare::equivalent(&phi, &psi, &tol).unwrap());
//! ```

pub mod compare;
pub mod cpmaps;
pub mod dilation;
pub mod error;
pub mod fixtures;
pub mod modspace;
pub mod numerics;
pub mod oracle;
pub mod scalar;

pub use cpmaps::{
    choi, derive_underlying, gns_stinespring, validate_module_cp, CPMap, ModuleCPMap, PhiStinespring, ValidationReport,
};
pub use dilation::{construct, ModuleStinespring, UnitaryEquivalenceWitness};
pub use error::{Error, Result};
pub use modspace::{HilbertModule, MatrixAlgebra};
pub use numerics::{CMat, TolerancePolicy};
pub use scalar::Real;

/// Complex double-precision matrix.
pub type CMatrix = CMat<f64>;
/// Tolerance policy in double precision.
pub type Tolerance = TolerancePolicy<f64>;
pub type ModuleMap = ModuleCPMap<f64>;
pub type UnderlyingMap = CPMap<f64>;
pub type Quintuple = ModuleStinespring<f64>;
pub type Commutant = compare::CommutantBasis<f64>;
pub type CommutantElement = compare::CommutantElement<f64>;
pub type Derivative = compare::RNDerivative<f64>;
