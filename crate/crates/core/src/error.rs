use thiserror::Error;

/// Errors raised by validation and numerical routines.
///
/// Matrix positions are reported 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds tolerance")]
    NonHermitianInput { deviation: f64 },

    #[error("{what} must be square, got {rows}x{cols}")]
    NotSquare {
        what: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("{what} has odd dimension {dim}; expected 2N")]
    OddDimension { what: &'static str, dim: usize },

    #[error("{what} is empty; at least one mode is required")]
    Empty { what: &'static str },

    #[error("{what} has a non-finite entry at ({row}, {col})")]
    NonFinite {
        what: &'static str,
        row: usize,
        col: usize,
    },

    #[error("{what} is not antisymmetric: entry ({row}, {col}) = {value} but ({col}, {row}) = {mirror}")]
    NotAntisymmetric {
        what: &'static str,
        row: usize,
        col: usize,
        value: f64,
        mirror: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Lyapunov equation is singular: eigenvalues {lhs} and {rhs} of A sum to zero")]
    SingularLyapunov { lhs: String, rhs: String },

    #[error("temperature monotone {nu} of mode {mode} lies outside [-1, 1]")]
    OutOfRangeNu { mode: usize, nu: f64 },

    #[error("mode index {index} out of range for {modes} mode(s)")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("joint transformation is not orthogonal: residual {residual:.3e}")]
    NonOrthogonalJoint { residual: f64 },

    #[error("environment state is unphysical: violation {violation:.3e}")]
    UnphysicalEnvironment { violation: f64 },

    #[error("generator is not completely positive: certificate eigenvalue {min_eigenvalue:.6e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("initial state is unphysical: violation {violation:.3e}")]
    UnphysicalInitialState { violation: f64 },

    #[error("state is unphysical: violation {violation:.3e}")]
    UnphysicalState { violation: f64 },

    #[error("physicality lost at t = {time}: violation {violation:.3e}")]
    PhysicalityLost { time: f64, violation: f64 },

    #[error("expected {expected} mode(s), found {found}")]
    WrongModeCount { expected: usize, found: usize },

    #[error("{modes} modes requested; the Fock-space oracle supports at most {max}")]
    TooManyModes { modes: usize, max: usize },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("Lindblad channel {index} is invalid: {reason}")]
    InvalidChannel { index: usize, reason: String },

    #[error("catalog entry {entry}: {detail}")]
    CatalogMismatch { entry: String, detail: String },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
