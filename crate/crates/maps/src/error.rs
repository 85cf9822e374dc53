use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        range: &'static str,
    },

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("necklace {index} has outer length {outer} but necklace {next} has inner length {inner}")]
    LengthMismatch {
        index: usize,
        next: usize,
        outer: usize,
        inner: usize,
    },

    #[error("{0}")]
    Unsupported(String),

    #[error("coloring has {found} entries, map has {expected} vertices")]
    Coloring { expected: usize, found: usize },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("exploration broke an invariant: {0}")]
    Exploration(String),
}

pub type Result<T> = std::result::Result<T, MapError>;
