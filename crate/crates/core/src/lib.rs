//! Error exponents and random-coding checks for stabilizer codes on Pauli
//! channels whose errors follow a Markov chain.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`] and [`symplectic`]: `F_d`, the symplectic form on `F_d^{2n}`,
//!   subspace algebra, sampling and enumeration of self-orthogonal subspaces.
//! - [`channel`] and [`twirl`]: the Markov error model, its entropy and
//!   divergence functionals, the Gilbert example, and the Pauli distribution of
//!   a Kraus map.
//! - [`types`]: second-order (Markov) types and type-class counting.
//! - [`exponent`]: the exponent `E(R,P)`, the rate threshold `1 − H(P|q)`, and a
//!   finite-`n` type-restricted counterpart.
//! - [`code_sim`]: minimum-entropy coset decoding over code ensembles with exact
//!   failure bounds, the counting identity, and the analytic bound.
//! - [`config`] and [`cli`]: channel files and the command-line front end.

pub mod channel;
pub mod cli;
pub mod code_sim;
pub mod config;
pub mod error;
pub mod exponent;
pub mod field;
pub mod symplectic;
pub mod twirl;
pub mod types;

pub use error::{Error, Result};
