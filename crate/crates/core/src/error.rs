use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("kappa = {kappa} is negative but -1/kappa is not a positive integer")]
    NonIntegerInverseKappa { kappa: f64 },

    #[error("kappa must be finite, got {0}")]
    NonFiniteKappa(f64),

    #[error("a window size sigma >= 1 is required for kappa >= 0")]
    MissingSigma,

    #[error("operation requires kappa < 0 (finite Fock space), got {regime}")]
    RequiresNegativeKappa { regime: String },

    #[error("operation requires kappa >= 0, got kappa = {kappa}")]
    RequiresNonNegativeKappa { kappa: f64 },

    #[error("operation requires kappa != 0")]
    RequiresNonZeroKappa,

    #[error("operation requires k >= 1; the k = 0 space is one-dimensional")]
    DegenerateSpace,

    #[error("structure function F_{mode}({n1},{n2}) = {value} is negative at kappa = {kappa}")]
    NegativeStructureFunction {
        mode: usize,
        n1: usize,
        n2: usize,
        kappa: f64,
        value: f64,
    },

    #[error("block index l = {l} out of range 0..={max}")]
    BlockOutOfRange { l: usize, max: usize },

    #[error("{name} = {value} out of range 0..{bound}")]
    IndexOutOfRange {
        name: &'static str,
        value: usize,
        bound: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("schema violation at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("JSON error at {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("eigenvalue solve failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;
