//! Exact computations with quasilinear p-forms over F_p(t_1..t_m).
//!
//! A p-form `<a_1,...,a_n>` is determined up to isometry by its dimension and
//! the F^p-span of its entries, so nearly every question reduces to linear
//! algebra over F^p in Frobenius coordinates (see [`groundfield`]).

pub mod classify;
pub mod extensions;
pub mod groundfield;
pub mod invariants;
pub mod qform;
pub mod random;

pub use groundfield::{FieldElem, GroundField};
pub use qform::{Diagonalization, QuasiForm};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not a p-th power")]
    NotAPthPower,
    #[error("target is not in the F^p-span of the basis")]
    NoSolution,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("forms live over different fields")]
    FieldMismatch,
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("quasi-Pfister slots must be nonzero")]
    ZeroSlot,
    #[error("the zero form has no norm field")]
    ZeroForm,
    #[error("form must be anisotropic")]
    Isotropic,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("unknown lemma {0:?}")]
    UnknownLemma(String),
    #[error("intermediate polynomial has {terms} terms, above the cap of {cap}")]
    ResourceLimit { terms: usize, cap: usize },
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
