//! Exact symbolic engine for graded manifolds: free graded-commutative
//! algebras, derivations, Lie algebroid differentials, Cartan calculus,
//! equivariant models, weight-graded cohomology and simplicial cochains.

#![allow(clippy::needless_range_loop)]

pub mod algebroids;
pub mod cartan;
pub mod cohomology;
pub mod derivations;
pub mod error;
pub mod gca;
mod linalg;
pub mod models;
pub mod random;
pub mod simplicial;

pub use derivations::Derivation;
pub use error::{Error, Result};
pub use gca::{Element, GeneratorTable, Monomial, Rational, WeightAssignment};
