use crate::mesh::MeshKind;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Variants are grouped into families that map onto distinct process exit
/// codes (see [`Error::exit_code`]) and onto the C status codes of the FFI
/// crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("graded layer regions overlap: graded extent {extent} is not below 1/2 (epsilon too large for this N and p)")]
    RegionOverlap { extent: f64 },

    #[error("wrong mesh kind: expected {expected}, got {found}")]
    WrongMeshKind { expected: MeshKind, found: MeshKind },

    #[error("polynomial degree {0} is below the minimum of 3 for C1 elements")]
    DegreeTooLow(usize),

    #[error("{intervals} intervals cannot be split into groups of {group}")]
    BadGrouping { intervals: usize, group: usize },

    #[error("coefficient violation at x = {x}: a = {a}, b = {b} (need a >= {a_floor} > 0, b >= 0)")]
    CoefficientViolation { x: f64, a: f64, b: f64, a_floor: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("zero vector where a nonzero one is required")]
    ZeroVector,

    #[error("matrix is not positive definite (pivot {index} = {pivot})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("requested {k} eigenpairs but the problem has only {dim} degrees of freedom")]
    KTooLarge { k: usize, dim: usize },

    #[error("approximate and reference functions are not sign aligned")]
    SignNotAligned,

    #[error("sign alignment is ambiguous: the functions are L2-orthogonal")]
    Ambiguous,

    #[error("layer width {0} is outside (0, 1/2)")]
    InvalidLayerWidth(f64),

    #[error("slope fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),

    #[error("slope fit needs strictly positive abscissae and errors")]
    NonpositiveError,

    #[error("singular perturbation assumption violated: epsilon = {epsilon} is not below 1/N = {}", 1.0 / *n as f64)]
    AssumptionViolated { epsilon: f64, n: usize },

    #[error("bad coefficient expression `{expr}`: {reason}")]
    Expression { expr: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Exit codes used by the command-line front end.
pub mod exit_code {
    pub const SUCCESS: i32 = 0;
    pub const GENERIC: i32 = 1;
    pub const INVALID_SPEC: i32 = 2;
    pub const REGION_OVERLAP: i32 = 3;
    pub const NO_CONVERGENCE: i32 = 4;
    pub const ASSUMPTION_VIOLATED: i32 = 5;
    pub const K_TOO_LARGE: i32 = 6;
    pub const NUMERICAL: i32 = 7;
    pub const IO: i32 = 8;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            InvalidSpec(_)
            | DegreeTooLow(_)
            | BadGrouping { .. }
            | WrongMeshKind { .. }
            | InvalidLayerWidth(_)
            | Expression { .. }
            | Config(_)
            | CoefficientViolation { .. } => exit_code::INVALID_SPEC,
            RegionOverlap { .. } => exit_code::REGION_OVERLAP,
            NoConvergence { .. } => exit_code::NO_CONVERGENCE,
            AssumptionViolated { .. } => exit_code::ASSUMPTION_VIOLATED,
            KTooLarge { .. } => exit_code::K_TOO_LARGE,
            NotPositiveDefinite { .. }
            | ZeroVector
            | SignNotAligned
            | Ambiguous
            | DimensionMismatch { .. }
            | TooFewPoints(_)
            | NonpositiveError => exit_code::NUMERICAL,
            Io(_) | Csv(_) | Json(_) => exit_code::IO,
        }
    }
}
