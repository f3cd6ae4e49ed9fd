use thiserror::Error;

/// Errors raised by the library. The CLI maps these onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A frame whose columns are (numerically) linearly dependent.
    #[error("degenerate frame: smallest R diagonal {smallest:e} vs largest {largest:e}")]
    DegenerateFrame { smallest: f64, largest: f64 },

    /// Matrices of different ambient dimension were combined.
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// An input violated an operation precondition (e.g. uncertified cubature).
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Group closure did not terminate within the element cap.
    #[error("orbit closure exceeded {cap} elements")]
    NonFiniteOrbit { cap: usize },

    #[error("empty configuration: {0}")]
    EmptyConfiguration(String),

    /// The optimizer produced a non-finite objective. `dump` carries the
    /// offending iterate as configuration JSON.
    #[error("numerical failure at iteration {iteration}: {message}")]
    Numerical {
        iteration: usize,
        message: String,
        dump: String,
    },

    /// Malformed input file or flag.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
