//! Finite effect algebras.
//!
//! The crate validates and classifies finite effect algebras, searches them
//! for compatibility structure (blocks, Boolean sub-orthoalgebras,
//! commutants), and models simple observables, spectral resolutions and
//! states with exact rational arithmetic.

pub mod algebra;
pub mod catalog;
pub mod classify;
pub mod compat;
pub mod observables;
pub mod states;
pub mod sweep;

/// Exact rational numbers used for spectra and states.
pub type Rational = num_rational::BigRational;

pub use algebra::{validate, Bounds, EffectAlgebra, Element, ElementSet, RawTable, ValidationReport};
pub use catalog::{enumerate_small, generate, GeneratorSpec};
