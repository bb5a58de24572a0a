//! Exact computation with rational geodesic currents on free groups and with
//! translation-length functions of Dehn-twist splittings.
//!
//! Everything is exact: coordinates, lengths, intersection numbers and
//! projective comparisons are [`Rational`] values, so identities between
//! them are checked with equality rather than tolerances.

pub mod automorphism;
pub mod checks;
pub mod currents;
pub mod dynamics;
mod error;
pub mod limits;
pub mod parse;
pub mod report;
pub mod sample;
pub mod trees;
pub mod word;

pub use automorphism::FreeAutomorphism;
pub use currents::{ConjugacyClass, CylinderTable, ProjectiveCurrentVector, RationalCurrent};
pub use error::{Error, Result};
pub use report::ConvergenceReport;
pub use trees::{ProjectiveTreeVector, TreeLengthFunction, Twist, TwistSplittingCore};
pub use word::{Basis, CyclicWord, Letter, Word};

/// Exact rational number used for every weight, coordinate and length.
pub type Rational = num_rational::BigRational;

/// Builds `numer/denom` as a [`Rational`]. Panics if `denom == 0`.
pub fn q(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

/// Builds an integral [`Rational`].
pub fn qi(value: i64) -> Rational {
    Rational::from_integer(value.into())
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_q(value: &Rational) -> String {
    value.to_string()
}
