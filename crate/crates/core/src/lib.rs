//! Combinatorial n-od covers of placed graphs.
//!
//! A *placed graph* is a finite graph whose vertices carry markings from the
//! alphabet `Γ = {o} ∪ {b(i,t)}`, alternating between the origin mark `o` and
//! ray marks `b(i,t)` along every edge.  This crate decides, exactly, whether
//! a placed graph admits a *δ-combinatorial n-od cover*: a map of its vertices
//! into the infinite n-od `C` subject to three axioms (fiber classes, graph
//! homomorphism, δ-closeness of coinciding straight-through images).
//!
//! On top of the decision procedure sit:
//!
//! * wrapping-pattern detection and classification ([`wrapping`]),
//! * the χ-expansion substitution system and cover descent ([`expansion`]),
//! * Ingram's graph-word and the no-cover verification pipeline ([`ingram`]),
//! * a piecewise-linear plane-geometry layer: Γ-spaces, embeddings, open
//!   covers with their nerves, and the geometric→combinatorial cover
//!   extraction ([`geometry`]).
//!
//! All combinatorial parameters (the `t` of a ray mark, the tolerance δ) are
//! exact rationals, so every strict inequality is decided exactly.

pub mod combcover;
pub mod expansion;
pub mod format;
pub mod geometry;
pub mod graphword;
pub mod ingram;
pub mod wrapping;

pub use combcover::{CombCover, SearchOutcome, SearchStats};
pub use graphword::{CVertex, Graph, Marking, NOdAddress, PlacedGraph, VertexId};

#[cfg(test)]
pub(crate) mod fixtures;

/// Exact rational used for ray parameters and tolerances.
pub type Rational = num_rational::BigRational;

/// Build a rational from an integer pair. Panics on zero denominator.
pub fn ratio(p: i64, q: i64) -> Rational {
    use num_bigint::BigInt;
    Rational::new(BigInt::from(p), BigInt::from(q))
}
