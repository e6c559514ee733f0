use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("truncated input: expected {expected} integers after the dimension, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("non-numeric token {token:?} at position {position}")]
    BadToken { token: String, position: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix {which} is not symmetric at ({row}, {col})")]
    Asymmetric {
        which: &'static str,
        row: usize,
        col: usize,
    },

    #[error("flow matrix is not rank-one with nonempty support: {0}")]
    NotRankOne(String),

    #[error("rank-one factor of the flow matrix is not 0/1 valued")]
    FactorNotBinary,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("automorphism group exceeds the element cap of {cap}")]
    GroupTooLarge { cap: usize },

    #[error("domain is not invariant under the group (element {0} maps outside it)")]
    DomainNotInvariant(usize),

    #[error("no orbits to choose from")]
    NoOrbits,

    #[error("reduced matrix is zero; the penalty scale is undefined")]
    ZeroMatrix,

    #[error("lifted problem has no free variables")]
    NoFreeVariables,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
