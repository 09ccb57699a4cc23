//! Exact structure computations for generalized super-Virasoro algebras.

pub mod automorphisms;
pub mod cohomology;
pub mod derivations;
pub mod grading;
pub mod scalar;
mod span;
pub mod superalgebra;
