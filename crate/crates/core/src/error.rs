use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("line {line}, column {column}: empty cell")]
    EmptyCell { line: u64, column: usize },

    #[error("line {line}, column {column}: cannot parse {value:?} as a number")]
    NotNumeric {
        line: u64,
        column: usize,
        value: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A metric has no defined value for the given input.
    #[error("undefined metric: {0}")]
    Undefined(String),

    #[error("malformed input: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] io::Error),
}
