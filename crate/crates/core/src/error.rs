use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has {0} distinct vertices, more than 32-bit ids allow")]
    TooManyVertices(u64),

    #[error("brute-force oracle supports at most {cap} vertices, graph has {vertices}")]
    OracleCapExceeded { vertices: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
