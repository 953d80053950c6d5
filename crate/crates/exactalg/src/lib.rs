//! Exact arithmetic over the rationals.
//!
//! The crate provides sparse multivariate polynomials with named
//! indeterminates ([`MPoly`]), dense univariate polynomials over an arbitrary
//! exact ring ([`UPoly`]) with subresultant resultants and discriminants, the
//! quadratic extension ring [`JElem`] with its single relation
//! `aa^2 = J5^2 - 4 J4 J6`, and integer matrices with Smith normal form.

pub mod error;
pub mod intmatrix;
pub mod jelem;
pub mod mpoly;
pub mod parse;
pub mod ring;
pub mod upoly;
pub mod vars;

mod gcd;

pub use error::AlgError;
pub use intmatrix::{smith_normal_form, IntMatrix, Snf};
pub use jelem::JElem;
pub use mpoly::{Monomial, MPoly};
pub use parse::parse_mpoly;
pub use ring::{Field, Ring, Q};
pub use upoly::UPoly;
pub use vars::{var, var_name, Var};

/// Parses a polynomial literal, panicking on malformed input.
///
/// Intended for embedding fixed formulas in code and tests.
pub fn mp(src: &str) -> MPoly {
    parse_mpoly(src).unwrap_or_else(|e| panic!("bad polynomial literal {src:?}: {e}"))
}

/// Rational constant from numerator and denominator.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}
