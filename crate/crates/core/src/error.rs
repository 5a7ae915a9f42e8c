use thiserror::Error;

/// Everything that can go wrong while building or analysing a centrality game.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("node {node} links to itself")]
    SelfLoop { node: usize },
    #[error("node {node} lists neighbor {neighbor} more than once")]
    DuplicateNeighbor { node: usize, neighbor: usize },
    #[error("node {node} references {neighbor}, outside 0..{n}")]
    OutOfRange { node: usize, neighbor: usize, n: usize },
    #[error("node {node} has no out-links")]
    EmptyOutSet { node: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid game parameters: {0}")]
    InvalidSpec(String),
    #[error("linear system is singular or numerically broken down: {0}")]
    SolveFailure(String),
    #[error("tree enumeration needs n <= {limit}, got n = {n}")]
    TooLargeForEnumeration { n: usize, limit: usize },
    #[error("configuration space of size {size} exceeds the limit {limit}")]
    SpaceTooLarge { size: u128, limit: u128 },
    #[error("best-response successor count exceeds the cap {cap}")]
    BudgetExceeded { cap: usize },
    #[error("noisy best-response weights underflowed at gamma = {gamma}")]
    NumericUnderflow { gamma: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
