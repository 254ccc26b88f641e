use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("division by zero")]
    DivisionByZero,

    #[error("initial vector is zero")]
    ZeroVector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("generator: {0}")]
    Generator(String),

    /// Zero pivot in a triangularized small dense system.
    #[error("singular small system (zero pivot at column {column})")]
    Singular { column: usize },

    /// The bordered collinearity system is singular: the seed residual
    /// polynomial vanishes at this shift.
    #[error("residual polynomial vanishes at shift")]
    ResidualPolynomialVanishes,

    #[error("basis slab is rank deficient")]
    RankDeficient,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
