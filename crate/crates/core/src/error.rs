use std::fmt;

use thiserror::Error;

use crate::bn::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A syntax or semantic error in a network description, with its 1-based
/// source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {}", join_violations(.0))]
    InvalidNetwork(Vec<Violation>),

    #[error(
        "network too large for exhaustive marginalization ({states} joint states, guard {guard})"
    )]
    TooLarge { states: u128, guard: u128 },

    #[error("impossible evidence: released counts have probability zero under BN")]
    ImpossibleEvidence,

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error at {0}")]
    Parse(ParseError),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
