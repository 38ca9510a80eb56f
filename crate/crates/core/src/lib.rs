//! Exact computer algebra for the derivation action of `sl_k` on the full
//! matrix algebra `M_k(Q)`.
//!
//! The crate builds, over exact rationals:
//! - the matrix algebra with its Cartan-Weyl style basis ([`matcore`]),
//! - the endomorphism algebra of `M_k` in the matrix-unit basis, with the
//!   opposite product used by exponential notation ([`endoalg`]),
//! - the universal enveloping algebra of `sl_k` with PBW straightening,
//!   comultiplication, Casimir elements and explicit preimages of the
//!   endomorphism units ([`pbw`]),
//! - the free algebra with endomorphism exponents, its Hopf action,
//!   evaluation, and multilinear identity testing ([`upoly`]),
//! - degree-2 consequence spans, membership tests and deduction replay for
//!   two-variable identities ([`ideals`]),
//! - codimension and cocharacter computations by exact rank ([`codim`]).
//!
//! Everything is exact; no floating point is used anywhere.

pub mod cli;
pub mod codim;
pub mod endoalg;
pub mod ideals;
pub mod linalg;
pub mod matcore;
pub mod pbw;
pub mod upoly;

use num::BigInt;
use num::BigRational;

/// Exact rational scalar used throughout the crate.
///
/// `BigRational` keeps the canonical form (reduced, positive denominator)
/// after every operation, so arithmetic never rounds or overflows.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("matrix size must be at least 2, got {0}")]
    InvalidSize(usize),
    #[error("invalid basis index for size {k}: {what}")]
    InvalidIndex { k: usize, what: String },
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("matrix has nonzero trace")]
    NotTraceless,
    #[error("endomorphism lies outside the distinguished subalgebra")]
    OutsideU,
    #[error("exponent pair is not a valid basis index (must pair two traceless basis elements, or be (g,g))")]
    InvalidExponentPair,
    #[error("polynomial is not multilinear")]
    NonMultilinear,
    #[error("variable x{0} has no assignment")]
    MissingAssignment(u32),
    #[error("comultiplication cap exceeded: degree {degree} across {slots} slots (cap {cap})")]
    ComultCapExceeded { degree: usize, slots: usize, cap: usize },
    #[error("dimension did not stabilize within degree cap {0}")]
    CapExceeded(usize),
    #[error("cell refused: {rows} evaluation rows exceed the guard of {limit}")]
    FeasibilityGuard { rows: u128, limit: u128 },
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("deduction step references result {0}, but only {1} results exist")]
    DanglingReference(usize, usize),
}

pub type Result<T> = std::result::Result<T, Error>;
