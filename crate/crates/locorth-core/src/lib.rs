//! Combinatorial machinery for the local orthogonality principle in Bell
//! scenarios: event encodings and orthogonality graphs, exact-rational
//! no-signaling boxes, maximal-clique search, inequality evaluation and
//! classification, wirings, product-basis constructions and capacity bounds.
//!
//! All probability arithmetic is exact (arbitrary-precision rationals);
//! floating point appears only in root finding and product-vector numerics.
//!
//! The crate is `no_std`-compatible (requires `alloc`). The companion crate
//! `locorth` carries file formats and the command line front end.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod boxes;
pub mod capacity;
pub mod classify;
pub mod inequalities;
pub mod lp;
pub mod scenario;
pub mod search;
pub mod upb;
pub mod wiring;

pub use boxes::{LhvModel, NsBox};
pub use inequalities::LoInequality;
pub use scenario::{Event, Graph, Scenario};

/// Exact rational used for all probabilities and inequality values.
pub type Rational = num_rational::BigRational;

use num_bigint::BigInt;

/// Shorthand for building a rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}
