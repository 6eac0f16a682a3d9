use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("cannot refine from levels {from:?} to coarser levels {to:?}")]
    Coarsening { from: [u32; 2], to: [u32; 2] },

    #[error("walsh truncation {requested} exceeds grid resolution {available}; refine the grid first")]
    WalshResolution { requested: usize, available: usize },

    #[error("corpus generation failed: {0}")]
    Corpus(String),

    #[error("majorization hypothesis violated: {0}")]
    Majorization(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
