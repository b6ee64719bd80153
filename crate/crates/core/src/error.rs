use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid problem: {0}")]
    Problem(String),

    /// Kernel or right-hand side produced a non-finite value at the logical
    /// node indices `(i, j)` (both in `-N..=N`; `j` is `None` for the rhs).
    #[error("non-finite value during assembly at row {i}, column {j:?}")]
    NonFinite { i: i64, j: Option<i64> },

    #[error("matrix is singular to working precision (pivot {pivot})")]
    Singular { pivot: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
