use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A document did not match its schema.
    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    /// A well-formed document describes an invalid instance.
    #[error("validation error: {0}")]
    Validation(String),

    /// Tensor dimensions disagree with the instance.
    #[error("shape error: {0}")]
    Shape(String),

    /// An operation that requires a feasible assortment got an infeasible one.
    #[error("infeasible assortment: {}", .0.join("; "))]
    Infeasible(Vec<String>),

    /// An argument is outside its documented domain.
    #[error("argument out of range: {0}")]
    OutOfRange(String),

    /// Exhaustive enumeration would exceed the configured ceiling.
    #[error("enumeration refused: estimated {estimate} combinations exceeds ceiling {ceiling}")]
    EnumerationCeiling { estimate: f64, ceiling: f64 },

    /// The geometric grids cannot be built for this instance.
    #[error("degenerate grids: {0}")]
    DegenerateGrid(String),

    /// The dynamic program would exceed a size ceiling.
    #[error("solver refused: {reason} (estimated {estimate:.3e} elementary steps)")]
    Refused { reason: String, estimate: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
