// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the matrix kernel and the map constructions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPSD(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("tolerances must be strictly positive")]
    InvalidTolerance,

    #[error("not a module CP map: no consistent underlying map (residual {0:e})")]
    NotAModuleCPMap(f64),

    #[error("map is not completely positive (min Choi eigenvalue {0:e})")]
    NotCP(f64),

    #[error("operator is not in the commutant (residual {0:e})")]
    NotInCommutant(f64),

    #[error("dilation is not minimal: {0}")]
    NotMinimal(String),

    #[error("maps are not equivalent")]
    NotEquivalent,

    #[error("no compatible S for the given T (residual {0:e})")]
    NoCompatibleS(f64),

    #[error("map is not dominated: {0}")]
    NotDominated(String),

    #[error("invalid Radon-Nikodym derivative: {0}")]
    InvalidDerivative(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation undefined for the zero map")]
    ZeroMap,
}

pub type Result<T> = std::result::Result<T, Error>;
