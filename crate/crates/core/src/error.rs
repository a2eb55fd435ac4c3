use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("not a strongly convex rational polyhedron: {0}")]
    NonScr(String),
    #[error("cells {0} and {1} do not meet in a common face")]
    NotAComplex(usize, usize),
    #[error("complex is not complete")]
    IncompleteInput,
    #[error("not a vertex: {0}")]
    NotAVertex(String),
    #[error("cell {0} is not a bounded edge")]
    UnboundedEdge(usize),
    #[error("not a cone of the recession fan: {0}")]
    NotARecessionCone(String),
    #[error("point {0} lies outside the support")]
    PointOutsideSupport(String),
    #[error("recession fans differ")]
    RecessionMismatch,
    #[error("not a refinement: {0}")]
    NotARefinement(String),

    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("sum is not a polynomial; remainder {0}")]
    NotPolynomial(String),

    #[error("pieces on cones {0} and {1} disagree on their common face {2:?}")]
    FaceMismatch(usize, usize, Vec<usize>),
    #[error("fan is not regular")]
    NotRegular,
    #[error("not a ray of the fan: {0}")]
    NotARay(String),
    #[error("map is not proper: {0}")]
    NotProper(String),

    #[error("pieces on cells {0} and {1} disagree on the direction space of face {2:?}")]
    FacetMismatch(usize, usize, Vec<usize>),
    #[error("vertex tuple is not in the kernel of rho (edge cell {0})")]
    NotInKernel(usize),

    #[error("towers are not compatible between models {0} and {1}")]
    CompatibilityViolation(usize, usize),
    #[error("tower does not stabilize within depth {0}")]
    NotStabilized(usize),
    #[error("not a lifting of the cycle: {0}")]
    NotALifting(String),
    #[error("vertical decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("weight is not orthogonal to the cone")]
    WeightNotOrthogonal,
    #[error("arithmetic cycle carries no Green certificate")]
    NoCertificate,
    #[error("class is not supported on cycles: {0}")]
    NotCycleSupported(String),

    #[error("internal assertion failed: {0}")]
    Internal(String),
}
