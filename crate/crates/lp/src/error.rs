use thiserror::Error;

use crate::solution::Status;

/// Structural problems with a [`crate::LinearProgram`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("column {col} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { col: String, lower: f64, upper: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("duplicate name {0}")]
    DuplicateName(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Invalid(#[from] LpError),
    /// Pivoting broke down or the final point failed certification; the
    /// instance most likely needs better scaling.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("iteration limit {0} reached")]
    IterationLimit(usize),
    #[error("warm-start basis has {got} entries, problem needs {expected}")]
    BasisMismatch { expected: usize, got: usize },
}

/// Returned when a quantity is requested from a non-optimal solution.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
#[error("operation requires an optimal solution, status is {0:?}")]
pub struct StatusError(pub Status);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle supports at most {max_cols} columns and {max_rows} rows, got {cols} and {rows}")]
    TooLarge {
        cols: usize,
        rows: usize,
        max_cols: usize,
        max_rows: usize,
    },
    #[error("feasible region has no vertex (free directions in the lineality space)")]
    NoVertex,
    #[error(transparent)]
    Invalid(#[from] LpError),
}

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
