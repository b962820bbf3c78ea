use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("alignment error: {0}")]
    Alignment(String),
    #[error("max-ent fit did not converge after {iterations} sweeps (worst residual {worst_residual:e})")]
    Convergence {
        iterations: usize,
        worst_residual: f64,
    },
    #[error("infinite code length: an observed cell has probability 0")]
    InfiniteLength,
    #[error("NMD undefined: both models have zero length")]
    Degenerate,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad user input (as opposed to internal failures).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::EmptyGraph
                | Error::Alignment(_)
                | Error::InvalidParameter(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::Precondition(_)
                | Error::Domain(_)
        )
    }
}
