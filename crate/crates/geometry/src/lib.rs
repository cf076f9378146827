//! Exact rational geometry for small polyhedra.
//!
//! Provides arbitrary-precision scalars, Gaussian elimination, an exact simplex solver with dual
//! certificates, the double description method, and pointed polyhedra with face enumeration.
//! No floating point is used for any combinatorial decision.

pub mod dd;
pub mod hyperplane;
pub mod linalg;
pub mod lp;
pub mod polyhedron;
pub mod scalar;

pub use hyperplane::Hyperplane;
pub use linalg::{nullspace_basis, rank, rref, solve};
pub use lp::{lp_solve, lp_solve_halfspaces, LpOptimum, LpOutcome, LpRow, Relation, Sense};
pub use polyhedron::{dual_description, Description, DualDescription, Face, GeneratorSet, Polyhedron};
pub use scalar::{Scalar, Vector};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("hyperplane normal must be nonzero")]
    ZeroNormal,
    #[error("ray must be nonzero")]
    ZeroRay,
    #[error("malformed rational {0:?}")]
    MalformedRational(String),
    #[error("face dimension {requested} exceeds ambient dimension {ambient}")]
    InvalidFaceDimension { requested: usize, ambient: usize },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("polyhedron contains a line; only pointed polyhedra are supported")]
    NotPointed,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
