//! Hyperbolic reflection groups of integral lattices.
//!
//! The crate runs Vinberg's algorithm on integral quadratic forms of
//! signature `(n, 1)`, turns the resulting mirrors into Coxeter diagrams,
//! classifies their elliptic and parabolic subdiagrams and computes orbifold
//! Euler characteristics and hyperbolic covolumes with exact rational
//! arithmetic.
//!
//! The [`table`] module chains everything together for the five lattices
//! `-x0^2 + m1 x1^2 + ... + m4 x4^2` (with `j` of the `m_i` equal to 3) that
//! arise as fixed lattices of the anti-involutions of the Eisenstein lattice
//! `E^{4,1}`, and reproduces the volumes of the five components of the moduli
//! space of real cubic surfaces.

#![allow(clippy::needless_range_loop)]

pub mod coxeter;
pub mod covolume;
pub mod decimal;
pub mod eisenstein;
mod error;
pub mod forms;
pub mod roots;
pub mod table;

pub use error::{Error, Result};

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
