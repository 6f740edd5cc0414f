//! Doob-Martin boundary machinery for level-graded Markov chains.
//!
//! The crate computes Martin kernels, cotransitions and h-transforms of
//! graded chains exactly (rational arithmetic) where enumeration is feasible
//! and in floating point where it is not. On top of that it works through the
//! boundary-theory route to de Finetti's theorem for finite alphabets: the
//! symbol-counting process of an exchangeable sequence is a Markov chain with
//! the cotransitions of the uniform composition walk, hence an h-transform of
//! it, and the boundary point it converges to is the directing measure.
//!
//! Modules:
//! - [`chain`]: graded chains, exact forward and backward laws, Martin kernel, path oracle, samplers.
//! - [`harmonic`]: harmonic functions, h-transforms and their identities.
//! - [`composition`]: the weak-composition walk, its closed-form kernels and simplex boundary.
//! - [`definetti`]: exchangeable sources, the counting chain, directing-measure recovery, binary lift.

pub mod chain;
pub mod composition;
pub mod definetti;
pub mod error;
pub mod harmonic;
pub mod mc;
pub mod prob;
pub mod report;

pub use error::{Error, Result};
pub use prob::ProbValue;
