//! Exact decomposition of polynomial automorphisms over the rationals.
//!
//! Plane automorphisms are factored into affine and elementary maps by
//! Newton-polygon reduction. Graded automorphisms in three variables are
//! classified, decomposed when graded-tame, and certified wild when a low
//! degree term survives restriction to the plane `z = 1`.

pub mod arith;
pub mod automorphism;
pub mod corpus;
pub mod error;
pub mod examples;
pub mod graded3;
pub mod grading;
pub mod jung;
pub mod newton;
pub mod parse;
pub mod rational;

pub use arith::{Monomial, Polynomial, Scalar};
pub use automorphism::{compose, PolyMap};
pub use error::{Error, Result};
pub use grading::{Grading, NormalizedGrading};
pub use jung::{decompose_plane, Factor, FactorChain, Provenance};

pub use rational::Rational;
pub type QPoly = Polynomial<Rational>;
pub type QMap = PolyMap<Rational>;
pub type QChain = FactorChain<Rational>;
