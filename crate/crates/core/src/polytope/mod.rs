//! Rational polyhedra: H/V representations, exact LP, vertex enumeration,
//! affine hulls and the lattice-preserving reduction to full dimension.

mod hpoly;
mod hull;
pub mod io;
pub mod lp;
mod vertices;

pub use hpoly::{Equality, HPolyhedron, Inequality, Strictness};
pub use hull::{
    affine_hull, full_dimensionalize, remove_redundant, volume, AffineEmbedding, AffineHull,
};
pub use lp::{is_feasible, is_nonempty, lp_optimize, strict_point, LpResult, LpStatus, Sense};
pub use vertices::vertex_enumeration;

use crate::exact::{denominator_lcm, Integer, RationalVector};

/// Vertex list of a bounded polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPolytope {
    pub vertices: Vec<RationalVector>,
}

impl VPolytope {
    /// lcm of all vertex-coordinate denominators.
    pub fn denominator(&self) -> Integer {
        denominator_lcm(self.vertices.iter().flatten())
    }
}
