//! Symplectic stabilizer codes over prime fields and the entropic quantities
//! that bound their performance on Pauli channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`gf`]: arithmetic in `F_d` and vectors in the interleaved
//!   `(u_1, v_1, ..., u_n, v_n)` layout with the standard symplectic form.
//! - [`symplectic`]: subspaces, symplectic complements, hyperbolic completion,
//!   coset coordinates and uniform sampling of self-orthogonal subspaces.
//! - [`channels`]: Pauli channels on the `d^2`-letter alphabet.
//! - [`codes`]: stabilizer codes, a small catalog, concatenation and direct sums.
//! - [`spectra`]: coset probability arrays and the coherent-information bound
//!   `c_n = k - H(col | row)`.
//! - [`exponent`]: the inner-code error exponent and type-counting helpers.
//! - [`qoracle`]: a dense-matrix quantum computation of coherent information,
//!   used to cross-check [`spectra`] at small sizes.
//! - [`simconcat`]: Monte Carlo simulation of the minimum-conditional-entropy
//!   decoder for concatenated codes, and the exact type-sum failure bound.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature; `std` only adds data-parallel enumeration through rayon.
//!
//! Finite-size quantities only: the asymptotic capacity statements these
//! bounds feed into cannot be evaluated at any finite `n` and are not
//! modelled here.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod channels;
pub mod codes;
mod error;
pub mod exponent;
pub mod gf;
mod linalg;
pub mod math;
pub mod qoracle;
pub mod simconcat;
pub mod spectra;
pub mod symplectic;

pub use channels::{LogBase, PauliChannel};
pub use codes::{ConcatenatedCode, StabilizerCode};
pub use error::{Error, Result};
pub use gf::{Field, FieldElement, FieldVector};
pub use spectra::{BoundReport, ProbabilityArray};
pub use symplectic::{HyperbolicBasis, Subspace};
