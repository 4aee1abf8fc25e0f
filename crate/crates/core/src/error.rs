use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid scalar: {0}")]
    InvalidScalar(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    /// 1-based position of the first entry that breaks the block Toeplitz pattern.
    #[error("matrix is not in the block Toeplitz group: entry ({row}, {col}) breaks the pattern")]
    NotInGroup { row: usize, col: usize },
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("seed for segment {segment} is not pseudo-orthogonal (residual {residual})")]
    InvalidSeed { segment: usize, residual: String },
    #[error("eigenvalues are not pairwise distinct: {0}")]
    NotGeneric(String),
    #[error("matrix is not unitary: {0}")]
    NotUnitary(String),
    #[error("sampling failed after {0} attempts")]
    SamplingFailed(usize),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("solver invariant violated: {0}")]
    Solver(String),
    #[error("json: {0}")]
    Json(String),
}

impl Error {
    /// Stable machine-readable name used in CLI error documents.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidScalar(_) => "InvalidScalar",
            Error::DivisionByZero => "DivisionByZero",
            Error::Shape(_) => "ShapeError",
            Error::SingularMatrix => "SingularMatrix",
            Error::InvalidBlock(_) => "InvalidBlock",
            Error::BackendUnavailable(_) => "BackendUnavailable",
            Error::NotNilpotent => "NotNilpotent",
            Error::NotInGroup { .. } => "NotInGroup",
            Error::Parity(_) => "ParityError",
            Error::InvalidGenerator(_) => "InvalidGenerator",
            Error::InvalidSeed { .. } => "InvalidSeed",
            Error::NotGeneric(_) => "NotGeneric",
            Error::NotUnitary(_) => "NotUnitary",
            Error::SamplingFailed(_) => "SamplingFailed",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::Solver(_) => "SolverInvariant",
            Error::Json(_) => "JsonError",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
