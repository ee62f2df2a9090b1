//! Maximum likelihood estimation of log-concave densities in undirected
//! graphical models.
//!
//! The estimate is a product of exponentials of tent functions, one per
//! maximal clique, found by maximizing a finite-dimensional concave objective
//! over the clique height vectors. The crate provides:
//!
//! - graph structure: maximal cliques, chordality, running intersection
//!   orderings, junction trees, Markov separation statements ([`graph`]);
//! - exact rational polytope geometry: hulls, projections, intersections, the
//!   support polytope of the estimate, and the iterated Markov-expansion sets
//!   ([`geometry`]);
//! - tent functions and the common refinement of the per-clique regular
//!   subdivisions ([`tent`], [`refine`]);
//! - closed-form integration of exponentials of affine functions over
//!   simplices and the optimization objective with subgradients
//!   ([`integrate`]);
//! - the quasi-Newton driver producing the fitted density ([`mle`]);
//! - clique-wise convex decomposition of positive semidefinite quadratic
//!   forms on chordal graphs ([`decomp`]).
//!
//! Geometry is generic over the scalar: exact arbitrary-precision rationals
//! for golden constructions and certificates, `f64` inside the optimizer.

pub mod error;
pub mod scalar;
pub mod linalg;
pub mod graph;
pub mod geometry;
pub mod tent;
pub mod refine;
pub mod integrate;
pub mod bfgs;
pub mod mle;

pub use error::{Error, Result};
pub use scalar::{Rat, Scalar};

/// Exact-rational polytope.
pub type RPolytope = geometry::Polytope<Rat>;
/// Float polytope used inside the optimizer.
pub type FPolytope = geometry::Polytope<f64>;
/// Exact-rational sample.
pub type RSample = geometry::Sample<Rat>;
