use thiserror::Error;

/// Errors raised across the nomination pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("block {block} has {actual} vertices but the model expects {expected}")]
    BlockSizeMismatch {
        block: usize,
        expected: usize,
        actual: usize,
    },

    #[error("block {block}: requested {requested} seeds but only {available} vertices exist")]
    TooManySeeds {
        block: usize,
        requested: usize,
        available: usize,
    },

    #[error("bernoulli entry ({i}, {j}) is unestimable: not enough seeds in the block pair")]
    UnestimableEntry { i: usize, j: usize },

    #[error("graph has no seed vertices")]
    NoSeeds,

    #[error("no seeds in the block of interest")]
    NoInterestSeeds,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid block assignment: {0}")]
    InvalidAssignment(String),

    #[error(
        "assignment space has {size} elements which exceeds the enumeration limit {limit}; use the sampling scheme (lcs) instead"
    )]
    Capacity { size: f64, limit: f64 },

    #[error("degenerate state space: every ambiguous vertex carries the same block label")]
    DegenerateStateSpace,

    #[error("probability {value} at ({i}, {j}) is outside the open interval (0, 1)")]
    ProbabilityOutOfRange { i: usize, j: usize, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("embedding dimension {dim} is outside 1..={n}")]
    InvalidDimension { dim: usize, n: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("covariance of cluster {cluster} collapsed (smallest eigenvalue {min_eigenvalue:e})")]
    CovarianceCollapse { cluster: usize, min_eigenvalue: f64 },

    #[error("cluster {cluster} emptied repeatedly during EM")]
    EmptyCluster { cluster: usize },

    #[error("covariance structure {0} is recognized but not implemented")]
    UnimplementedCovariance(String),

    #[error("unknown covariance structure {0}")]
    UnknownCovariance(String),

    #[error("every candidate mixture fit failed")]
    AllFitsFailed,

    #[error("average precision undefined: no ambiguous vertices in the block of interest")]
    EmptyDepthRange,

    #[error("vertex sets disagree: {0}")]
    VertexMismatch(String),

    #[error("time budget {target:.6}s is below the fixed overhead {overhead:.6}s")]
    BudgetBelowOverhead { target: f64, overhead: f64 },

    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse error classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    Capacity,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Capacity { .. } | Error::BudgetBelowOverhead { .. } => ErrorClass::Capacity,
            Error::Eigensolver(_)
            | Error::CovarianceCollapse { .. }
            | Error::EmptyCluster { .. }
            | Error::AllFitsFailed
            | Error::DegenerateStateSpace => ErrorClass::Numerical,
            Error::Replicate { source, .. } => source.class(),
            _ => ErrorClass::Validation,
        }
    }

    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid-params",
            Error::BlockSizeMismatch { .. } => "block-size-mismatch",
            Error::TooManySeeds { .. } => "too-many-seeds",
            Error::UnestimableEntry { .. } => "unestimable-entry",
            Error::NoSeeds => "no-seeds",
            Error::NoInterestSeeds => "no-interest-seeds",
            Error::InvalidGraph(_) => "invalid-graph",
            Error::InvalidAssignment(_) => "invalid-assignment",
            Error::Capacity { .. } => "capacity",
            Error::DegenerateStateSpace => "degenerate-state-space",
            Error::ProbabilityOutOfRange { .. } => "probability-out-of-range",
            Error::InvalidConfig(_) => "invalid-config",
            Error::InvalidDimension { .. } => "invalid-dimension",
            Error::Eigensolver(_) => "eigensolver",
            Error::CovarianceCollapse { .. } => "covariance-collapse",
            Error::EmptyCluster { .. } => "empty-cluster",
            Error::UnimplementedCovariance(_) => "unimplemented-covariance",
            Error::UnknownCovariance(_) => "unknown-covariance",
            Error::AllFitsFailed => "all-fits-failed",
            Error::EmptyDepthRange => "empty-depth-range",
            Error::VertexMismatch(_) => "vertex-mismatch",
            Error::BudgetBelowOverhead { .. } => "budget-below-overhead",
            Error::Replicate { source, .. } => source.kind(),
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
