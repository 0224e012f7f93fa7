use thiserror::Error;

/// Errors produced by graph construction, fitting, evaluation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("record {index}: self-loop comparison on node {node}")]
    SelfLoop { index: usize, node: usize },

    #[error("record {index}: node id {node} out of range (graph has {n_nodes} nodes)")]
    NodeOutOfRange {
        index: usize,
        node: usize,
        n_nodes: usize,
    },

    #[error("{context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("{0} contains a non-finite value")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("pruning rate {0} outside [0, 100]")]
    InvalidPruneRate(f64),

    #[error("no inliers remain after pruning")]
    NoInliers,

    #[error("no edges survive majority-vote filtering")]
    EmptyMajorityGraph,

    #[error(
        "coordinate descent failed to converge at grid point {lambda_index} \
         (lambda = {lambda:.6e}, residual change {residual:.3e} after {sweeps} sweeps)"
    )]
    LassoNonConvergence {
        lambda_index: usize,
        lambda: f64,
        residual: f64,
        sweeps: usize,
    },

    #[error("normal equations are not positive definite")]
    NotPositiveDefinite,

    #[error("need at least 2 items to evaluate a ranking, got {0}")]
    TooFewItems(usize),

    #[error("degenerate ground truth: {0}")]
    DegenerateTruth(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("missing feature row for node {0}")]
    MissingFeatureRow(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code contract: 1 for validation failures, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::LassoNonConvergence { .. }
            | Error::NotPositiveDefinite
            | Error::NonFinite(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
