//! Exact symbolic engine for the Heisenberg-Weyl operator algebra.
//!
//! The crate is organized bottom-up: `scalar` provides exact Gaussian-rational
//! coefficients over Laurent monomials in named parameters, `matrix` adds small
//! fixed-dimension matrix coefficients (Pauli and gamma families), `algebra`
//! implements normally ordered words in the eight canonical generators together
//! with commutators, adjoint series and substitution, `generators` builds the
//! symmetry generators and verifies bracket tables, `derive` solves centralizer
//! constraints and emits equations of motion, and `numeric` validates derived
//! operators on sampled grids and closed-form states.

pub mod algebra;
pub mod derive;
pub mod generators;
pub mod matrix;
pub mod numeric;
pub mod render;
pub mod scalar;

pub use scalar::{Registry, ScalarValue, Sym};
