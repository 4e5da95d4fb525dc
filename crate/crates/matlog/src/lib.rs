//! A workbench for logics defined by finite matrices.
//!
//! The crate revolves around a handful of concrete objects:
//!
//! - [`algebra::FiniteAlgebra`]: a finite universe together with explicit
//!   operation tables, plus direct powers and subalgebras of powers;
//! - [`algebra::Matrix`]: an algebra with a designated subset, which defines
//!   a consequence relation by preservation of designation;
//! - [`syntax::Formula`]: propositional formulas with a text grammar;
//! - [`semantics`]: exhaustive valuation sweeps deciding consequence,
//!   theoremhood, antitheorems and (quasi-)equational validity;
//! - [`external`]: the subclassicality check and the expansion of a matrix
//!   with the external operator `delta1`;
//! - [`structure`]: information order, Boolean skeletons, conuclei, and the
//!   decision procedure for when a subalgebra of a power supports `delta1`;
//! - [`metatheory`]: recapture of classical rules, algebraizability and
//!   deduction-theorem witnesses, deductive equivalence, clone generation
//!   and term equivalence.
//!
//! Everything is exhaustively decidable at the scales involved (three-element
//! base algebras, powers up to exponent three); the point of the crate is to
//! make those decisions reproducible and loudly certified.

pub mod algebra;
pub mod builtins;
pub mod external;
pub mod files;
pub mod metatheory;
pub mod semantics;
pub mod structure;
pub mod syntax;
