//! Noncommutative differential equations at desk scale.
//!
//! The crate is `no_std` (with `alloc`) and purely algorithmic:
//!
//! * [`ncseries`] – words over an ordered alphabet and degree-truncated
//!   noncommutative series over a pluggable coefficient [`ring::Ring`].
//! * [`funring`] – the exact differential ring spanned by
//!   `z^a (1-z)^b log(z)^p log(1/(1-z))^q`, with monodromy operators.
//! * [`btt`] – independence certificates for the coefficients of solutions
//!   of `d(S) = M S`.
//! * [`solver`] – Picard and Magnus integration of `S' = M(t) S` on closed
//!   matrix groups.
//! * [`formal`] – the free differential algebra on `X, X', X'', ...` and the
//!   exact identities behind the Magnus expansion.
//! * [`hyperlog`] – hyperlogarithms on `{x0, x1}`: nested sums,
//!   regularization, Chen transport and the shuffle-character identity.
//!
//! File formats, the CLI and anything touching IO live in the `ncde` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod btt;
pub mod error;
pub mod formal;
pub mod funring;
pub mod hyperlog;
pub mod linalg;
pub mod ncseries;
pub mod quadrature;
pub mod ring;
pub mod solver;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use ring::{MPoly, Rational, Ring};
