use menuex_geometry::GeometryError;
use thiserror::Error;

/// Diagnostics raised by scenario validation and the analysis operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("allocation space is empty")]
    EmptySpace,
    #[error("allocation space is lower-dimensional (affine dimension {found} < {expected})")]
    LowerDimensionalSpace { expected: usize, found: usize },
    #[error("allocation space is unbounded")]
    UnboundedSpace,
    #[error("type cone is not full-dimensional (rank {rank} < {dim})")]
    ConeNotFullDimensional { rank: usize, dim: usize },
    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch { what: String, expected: usize, found: usize },
    #[error("menu is empty")]
    EmptyMenu,
    #[error("item {item} violates facet {facet}")]
    ItemOutsideSpace { item: String, facet: String },
    #[error("veto allocation {0} is not a vertex of the allocation space")]
    VetoNotVertex(String),
    #[error("veto allocation {0} is missing from the menu (individual rationality requested)")]
    VetoMissing(String),
    #[error("type must be a nonzero vector")]
    ZeroType,
    #[error("type {0} lies outside the type cone")]
    TypeOutsideCone(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("operation requires d = 2, scenario has d = {0}")]
    NotPlanar(usize),
    #[error("operation requires d >= 3, scenario has d = {0}")]
    DimensionTooSmall(usize),
    #[error("menu is not exhaustive")]
    NotExhaustive,
    #[error("perturbation retry budget exhausted after {0} attempts; delta may be too small for this configuration")]
    RetryBudgetExhausted(usize),
    #[error("certificate rejected: {0}")]
    CertificateRejected(String),
    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },
    #[error("cannot access {path}: {message}")]
    Io { path: String, message: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CoreError {
    /// Process exit code: 2 for internal invariant violations, 1 for every other diagnostic.
    pub fn exit_code(&self) -> i32 {
        match self {
            CoreError::Internal(_)
            | CoreError::CertificateRejected(_)
            | CoreError::Geometry(GeometryError::Internal(_)) => 2,
            _ => 1,
        }
    }

    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        CoreError::Parse { field: field.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
