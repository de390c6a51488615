use std::fmt;

use thiserror::Error;

/// Source position of a token or clause, 1-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl Location {
    pub fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at {location}: {message}")]
    Syntax { location: Location, message: String },

    #[error("reserved word `{word}` used as a clause head at {location}")]
    ReservedHead { word: String, location: Location },

    #[error("empty body in clause at {location}")]
    EmptyBody { location: Location },

    #[error("empty program")]
    EmptyProgram,

    #[error("duplicate head `{symbol}`: clauses at {first} and {second}")]
    DuplicateHead {
        symbol: String,
        first: Location,
        second: Location,
    },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("empty query")]
    EmptyQuery,

    #[error("vector entry {index} is {value}, expected 0 or 1")]
    NonBooleanVector { index: usize, value: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("hardmax of an empty vector")]
    EmptyInput,

    #[error("max_steps must be at least 1")]
    ZeroSteps,
}

pub type Result<T> = std::result::Result<T, Error>;
