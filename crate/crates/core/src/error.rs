use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("graph is disconnected: no path between {from} and {to}")]
    Disconnected { from: usize, to: usize },

    #[error("illegal move: {0}")]
    IllegalMove(String),

    /// An exhaustive enumeration would exceed the hard subset limit.
    #[error("enumeration guard exceeded: {subsets} subsets to evaluate, limit is {limit}")]
    Guard { subsets: u128, limit: u128 },

    /// A proof-object construction could not be completed.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True for errors caused by the caller's data rather than by a guard or
    /// an internal construction failure.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Input(_)
                | Error::DimensionMismatch { .. }
                | Error::Disconnected { .. }
                | Error::IllegalMove(_)
                | Error::Json(_)
        )
    }
}
