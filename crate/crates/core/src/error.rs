use thiserror::Error;

/// Errors raised by the model, gauge, map and witness layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A vector does not match the representation a model expects
    /// (sparse sequence vs. grid function, or grids of different size).
    #[error("representation error: {0}")]
    Representation(String),

    /// A gauge/model pairing or model parameter is not supported.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A scalar parameter is out of its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A vector that must have unit strong norm does not.
    #[error("normalization error: {0}")]
    Normalization(String),

    /// An operation was called on an input its contract excludes.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The derivative is not invertible at the requested point.
    #[error("derivative is not invertible at the origin")]
    NotInvertible,

    /// A root bracket could not be established in floating point.
    #[error("numerical range error: {0}")]
    NumericalRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
