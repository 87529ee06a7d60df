//! Exact-rational hyperplane arrangements: intersection lattices, k-adjoint
//! arrangements and the matroid, adjoint and Schubert stratum labels of
//! k-dimensional subspaces.
//!
//! All arithmetic is over `BigRational`; no floating point is used anywhere.

pub mod arrangement;
pub mod cli;
pub mod error;
pub mod exactlin;
pub mod matroid;
pub mod pluecker;
pub mod sampling;
pub mod strata;

pub use arrangement::{
    build_arrangement, center, intersection_lattice, maximal_chains, parse_arrangement,
    restriction, Arrangement, Flat, IntersectionLattice,
};
pub use error::{Error, Result};
pub use exactlin::{Rational, RationalMatrix, Subspace};
pub use matroid::{lattice_isomorphic, matroid_from, restriction_lattice, Matroid, RankedLattice};
pub use pluecker::{
    adjoint_hyperplane, eval_adjoint, k_adjoint, pluecker_vector, AdjointHyperplane, PlueckerVector,
};
pub use sampling::{parse_subspace, sample_subspace};
pub use strata::{
    adjoint_label, matroid_label, schubert_label, verify_equivalence,
    verify_restriction_classification, Stratifier,
};
