//! Exact local densities of monic polynomials over the p-adic integers.
//!
//! For a congruence-defined subset Σ of the monic degree-n polynomials over
//! Z_p, this crate computes the density of f ∈ Σ whose discriminant has p-adic
//! valuation 0 or 1 (squarefree discriminant) and the density of f such that
//! `Z_p[x]/(f)` is the maximal order of `Q_p[x]/(f)`. Eight subset families are
//! supported; every density is an exact rational, obtained by three
//! independent routes that can be cross-checked to exact equality:
//!
//! * [`closed_forms`] — direct evaluation of the closed-form density expressions,
//! * [`engine`] — a general character-sum formula over an admissible triple,
//! * [`oracle`] — exhaustive enumeration mod p² (resultants + Dedekind).
//!
//! [`euler`] evaluates the global Euler-product constants built from the
//! local factors, with certified interval bounds.

pub mod characters;
pub mod closed_forms;
pub mod cyclotomic;
pub mod engine;
pub mod euler;
pub mod fp_poly;
pub mod oracle;
pub mod series;
pub mod verify;

pub use closed_forms::SigmaFamily;
pub use engine::{AdmissibleTriple, DensityResult, Method};


/// Exact rational scalar used throughout the crate.
pub type Rat = num_rational::BigRational;

/// Arbitrary-precision integer used throughout the crate.
pub type Int = num_bigint::BigInt;

pub(crate) fn rat_int(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

#[cfg(test)]
pub(crate) fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}
