use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polyhedron is unbounded")]
    UnboundedPolyhedron,
    #[error("affine hull of the dilated family never meets the integer lattice")]
    NoLatticeCompatibleOrigin,
    #[error("degenerate arrangement: hyperplane {index} ({hyperplane}) contains the whole polytope")]
    DegenerateArrangement { index: usize, hyperplane: String },
    #[error("verification failure: {0}")]
    VerificationFailure(String),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("integer overflow in lattice-point counter")]
    Overflow,
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}
