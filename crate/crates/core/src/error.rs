use thiserror::Error;

use crate::model::{ItemId, Packing};
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid packing: {0}")]
    InvalidPacking(String),

    #[error("item {0} not found in packing")]
    ItemNotFound(ItemId),

    /// The exact search ran out of nodes before proving optimality.
    #[error("node budget exceeded: best packing has {} bins, lower bound is {lower_bound}", best.bin_count())]
    BudgetExceeded {
        best: Box<Packing>,
        lower_bound: usize,
    },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("divisibility requirement violated: {0}")]
    Divisibility(String),

    #[error("non-integral construction parameter: {0}")]
    Integrality(String),

    #[error("input mismatch: {0}")]
    Mismatch(String),

    #[error("malformed document: {0}")]
    Document(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Convenience for diagnostics that carry an exact value.
pub(crate) fn domain(what: &str, value: &Rational) -> Error {
    Error::Domain(format!("{what} = {}", crate::rational::to_pq(value)))
}
