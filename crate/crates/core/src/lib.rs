//! Exact combinatorics of negative definite plumbing graphs: discriminant
//! groups, splice diagrams, linking numbers, splice equations and the value
//! semigroups of rooted end curves.
//!
//! The linear algebra in [`lattice`] and [`splice`] is generic over
//! [`Scalar`]; everything above it works with the aliases below.

pub mod catalog;
pub mod dcurve;
pub mod equations;
pub mod error;
pub mod graph;
pub mod harness;
pub mod lattice;
pub mod scalar;
pub mod semigroup;
pub mod splice;

pub use error::{Error, Result};
pub use graph::{ResolutionGraph, VertexId};
pub use scalar::Scalar;

/// Canonical unbounded integer.
pub type Int = num_bigint::BigInt;
/// Exact rational in lowest terms.
pub type Rational = num_rational::Ratio<Int>;
pub type Matrix = lattice::IntMatrix<Int>;
pub type DClass = lattice::DClass<Int>;
pub type DiscriminantGroup = lattice::DiscriminantGroup<Int>;
