//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line in an SVMlight/LETOR file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The input contained no records.
    #[error("empty dataset: no records found")]
    EmptyDataset,

    /// Input violated a documented precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Argument outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Exhaustive enumeration would exceed the size guard.
    #[error(
        "enumeration refused: {n_docs} docs at cutoff {k} gives {size} rankings, \
         above the bound of {bound}"
    )]
    EnumerationGuard {
        n_docs: usize,
        k: usize,
        size: u64,
        bound: u64,
    },

    /// A key=value config file could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// A model file could not be parsed.
    #[error("model error: {0}")]
    Model(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
