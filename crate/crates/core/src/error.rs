use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("vertex {0} is already in the subset")]
    AlreadyMember(usize),

    #[error("vertex {0} is not in the subset")]
    NotMember(usize),

    #[error("exhaustive enumeration needs n <= {limit}, got n = {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("enumeration of {needed} subsets exceeds budget {budget} and sampling is disabled")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("malformed graph file: {0}")]
    Format(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
