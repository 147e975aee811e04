//! Confluent supersymmetric (Darboux) transformations of arbitrary order for
//! one-dimensional Dirac equations with pseudoscalar potentials.
//!
//! The Dirac problem is reduced to a Schrödinger equation, transformed through
//! a Jordan chain at a single factorization energy, and mapped back through a
//! Riccati equation. Every object is a [`numerics::SampledFunction`] on a
//! shared uniform grid.

pub mod catalog;
pub mod cli;
pub mod dirac;
pub mod error;
pub mod numerics;
pub mod specfun;
pub mod spectral;
pub mod susy_core;

pub use error::{Error, Result};
