//! Library-wide error type with process exit-code mapping.

use thiserror::Error;

/// Errors surfaced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data (files, labels, weights).
    #[error("input error: {0}")]
    Input(String),

    /// An operation was called outside its contract (e.g. open walk where
    /// a closed walk is required).
    #[error("usage error: {0}")]
    Usage(String),

    /// The instance violates a structural precondition of the pipeline
    /// (e.g. no alternating orientation exists).
    #[error("structure error: {0}")]
    Structure(String),

    /// The embedding is not parity-consistent. Carries a witness closed
    /// walk, as a sequence of edge ids, that is odd but 2-sided.
    #[error("parity error: {msg}; witness walk edges {witness:?}")]
    Parity { msg: String, witness: Vec<usize> },

    /// The search budget (odd cycle packing bound) was exhausted.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A requested construction would exceed explicit size caps.
    #[error("too large: {0}")]
    TooLarge(String),

    /// A subproblem that must be feasible was not.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An internal invariant failed; indicates a bug, not bad input.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code for the CLI: 2 input/usage/structure, 3 budget,
    /// 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Budget(_) => 3,
            Error::Internal(_) => 4,
            _ => 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::Input("x".into()).exit_code(), 2);
        assert_eq!(Error::Usage("x".into()).exit_code(), 2);
        assert_eq!(
            Error::Parity { msg: "x".into(), witness: vec![0, 1, 2] }.exit_code(),
            2
        );
        assert_eq!(Error::Budget("x".into()).exit_code(), 3);
        assert_eq!(Error::TooLarge("x".into()).exit_code(), 2);
        assert_eq!(Error::Internal("x".into()).exit_code(), 4);
    }
}
