//! Exact non-Archimedean Nevanlinna theory for polynomial maps into
//! projective varieties.
//!
//! Everything is generic over a coefficient field implementing
//! [`ValuedField`]. Two concrete fields are provided: the rationals with a
//! p-adic absolute value (characteristic 0) and `F_p(t)` with the t-adic
//! absolute value (characteristic p). The aliases at the bottom of this file
//! name the common instantiations.

pub mod error;
pub mod valfield;
pub mod polyring;
pub mod linalg;
pub mod nevanlinna;
pub mod truncation;
pub mod projgeom;
pub mod lp;
pub mod nochka;
pub mod wronskian;
pub mod harness;
mod ser;

pub use error::{Error, Result};
pub use polyring::{MultiIndex, Polynomial, RationalFunction};
pub use valfield::{LogValue, PadicRationals, TadicFunctionField, ValuedField, ValuedFieldConfig};

/// Exact rational scalar used for logarithms, radii and weights.
pub type Rat = num_rational::BigRational;

pub type PadicPolynomial = Polynomial<PadicRationals>;
pub type TadicPolynomial = Polynomial<TadicFunctionField>;
pub type PadicRationalFunction = RationalFunction<PadicRationals>;
pub type TadicRationalFunction = RationalFunction<TadicFunctionField>;
