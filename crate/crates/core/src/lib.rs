//! Lattices, divisor classes, quartic surfaces and Weierstrass models for
//! K3 surfaces polarized by `H + E7 + E7`.

pub mod error;
pub mod divisors;
pub mod lattices;
pub mod quartic;
pub mod fibrations;
pub mod duality;
pub mod report;

pub use error::{K3Error, Result};
