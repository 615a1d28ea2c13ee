//! Lattice-point enumeration for inside-out polytopes.
//!
//! The crate counts integer points in dilates of rational polytopes with a
//! hyperplane arrangement removed, and applies this to the affine and
//! cubical magic-square counting functions. Everything is exact: numbers are
//! big integers or big rationals throughout.
//!
//! Modules, bottom-up:
//! - [`exact`]: rationals, matrices, polynomials, integer lattice bases
//! - [`polytope`]: H-representations, exact simplex, vertex enumeration,
//!   affine hulls and the lattice-preserving reduction to full dimension
//! - [`arrangement`]: inside-out polytopes and region enumeration by
//!   recursive splitting
//! - [`ehrhart`]: lattice-point counting, Ehrhart quasipolynomials,
//!   reciprocity, and the Möbius-inversion cross-check
//! - [`gfun`]: quasipolynomials and rational generating functions
//! - [`magic`]: magic-square polytopes, the brute-force oracle and the full
//!   counting pipeline
//! - [`run`]: parallel, checkpointed orchestration of the region pipeline

pub mod arrangement;
pub mod ehrhart;
pub mod error;
pub mod exact;
pub mod gfun;
pub mod magic;
pub mod polytope;
pub mod run;

pub use error::{Error, Result};
