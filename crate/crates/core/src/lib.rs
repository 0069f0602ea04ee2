//! Zero-energy radial potentials built by composition.
//!
//! A base pair `(φ₀, χ₀)` of zero-energy solutions with no bound states maps
//! any s-wave potential `V₁` with regular solution `φ₁` to a new potential
//! whose regular solution is `χ₀·φ₁(φ₀/χ₀)`. The crate provides the catalog of
//! closed-form bases, the composition itself and numerical checks of every
//! result.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod potential;
pub mod special;
pub mod transform;

pub use catalog::{make_chi_first, make_pair, make_potential, FamilyId, PairPoint, SolutionPair};
pub use error::{Error, Result};
pub use potential::{OriginClass, PotentialSpec, TailClass};
pub use transform::{compose, iterate, ComposedSystem};
