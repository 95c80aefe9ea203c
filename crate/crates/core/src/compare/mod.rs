// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

//! Comparison of module CP maps.
//!
//! * [`equivalent`] and [`connecting_partial_isometry`]: `Φ ∼ Ψ` and the
//!   partial isometry `V` with `Φ = V Ψ`.
//! * [`is_dominated`]: the preorder `Ψ ≼ Φ`.
//! * [`commutant`], [`complete_commutant_element`], [`compress`]: the
//!   commutant `π_Φ(X)'` of the dilation and the maps `Φ_{T⊕S}` it produces.
//! * [`rn_derivative`], [`reconstruct_stinespring`], [`is_pure`].

mod commutant;
mod derivative;
mod domination;
mod equivalence;

pub use commutant::{commutant, complete_commutant_element, compress, CommutantBasis, CommutantElement};
pub use derivative::{
    is_pure, reconstruct_stinespring, rn_derivative, scalar_derivative, PurityReport, RNDerivative, Reconstruction,
};
pub use domination::{is_dominated, DominationMode, DominationVerdict};
pub use equivalence::{connecting_partial_isometry, equivalent};
