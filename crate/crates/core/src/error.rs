use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive-semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },

    #[error("matrix is not positive-definite: {0}")]
    NotPositiveDefinite(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("projection is not idempotent (residual {residual:e})")]
    NotIdempotent { residual: f64 },

    #[error("projections are not complementary (residual {residual:e})")]
    NotComplementary { residual: f64 },

    #[error("trivial projection pair: rank {n0} in dimension {n}")]
    Trivial { n0: usize, n: usize },

    #[error("operation requires the identity scalar product")]
    NonIdentityH,

    #[error("degenerate subspace: found {found} independent vectors, expected {expected}")]
    DegenerateSubspace { found: usize, expected: usize },

    #[error("subspaces are nearly parallel (largest cosine {sigma_max})")]
    NearlyParallel { sigma_max: f64 },

    #[error("Gram matrix of the metric over the adapted basis is singular")]
    SingularGram,

    #[error("edge {edge} is a self-loop")]
    SelfLoop { edge: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),

    #[error("{edges} edges is too many for spanning-tree enumeration (limit {limit})")]
    TooLargeForOracle { edges: usize, limit: usize },

    #[error("wrong topology: {0}")]
    WrongTopology(String),

    #[error("short circuit: {0}")]
    ShortCircuit(String),

    #[error("invalid source placement: {0}")]
    InvalidSource(String),

    #[error("supersymmetry algebra violated (max residual {residual:e})")]
    AlgebraViolation { residual: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
