use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input (bad genus, wrong dimensions, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A mathematical precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The point is not in the image of the main-component parameterization.
    #[error("point is not in the image of the parameterization: {0}")]
    NotInImage(String),

    /// The prime divides a denominator of the matrix; draw another prime.
    #[error("prime {0} divides a matrix denominator")]
    BadPrime(u64),

    /// tau vanishes (numerically) at the evaluation point.
    #[error("singular point: {0}")]
    Singular(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
