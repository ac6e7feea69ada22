use thiserror::Error;

use crate::quiver::Violation;

/// Errors raised by the library.
///
/// The variants are grouped by how a front end should react: invalid input,
/// an explicit refusal (size or budget), or a broken internal invariant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quiver data: {}", format_violations(.0))]
    Validation(Vec<Violation>),

    #[error("could not parse input: {0}")]
    Parse(String),

    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("symbol `{0}` is missing from the assignment")]
    MissingSymbol(String),

    #[error("symbol `{0}` declared twice")]
    DuplicateSymbol(String),

    #[error("{method} supports total size n <= {bound}, got n = {n}")]
    SizeRefused { method: &'static str, n: usize, bound: usize },

    #[error("{method} would evaluate about {terms} terms, above the budget of {budget}")]
    BudgetExceeded { method: &'static str, terms: u128, budget: u128 },

    #[error("diagonal block {block} is not a scalar multiple of the identity")]
    NonScalarDiagonal { block: usize },

    #[error("quiver has infinitely many prime cycles; use the truncated Euler product")]
    InfinitePrimes,

    #[error("vertex weight z_{vertex} vanishes on a prime cycle")]
    ZeroVertexWeight { vertex: usize },

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("unknown example family `{0}`")]
    UnknownExample(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    /// True for explicit refusals (size, budget, unsupported method/mode).
    pub fn is_refusal(&self) -> bool {
        matches!(
            self,
            Error::SizeRefused { .. }
                | Error::BudgetExceeded { .. }
                | Error::InfinitePrimes
                | Error::Assumption(_)
                | Error::Unsupported(_)
                | Error::NonScalarDiagonal { .. }
                | Error::ZeroVertexWeight { .. }
        )
    }

    /// True for malformed or inconsistent input.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::Parse(_)
                | Error::NotSquare { .. }
                | Error::Dimension(_)
                | Error::MissingSymbol(_)
                | Error::DuplicateSymbol(_)
                | Error::UnknownExample(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
