use thiserror::Error;

/// Errors produced by the sampler core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("frequency grids differ: {0}")]
    GridMismatch(String),

    #[error("layout requires {required} qubits but the simulation cap is {cap}")]
    QubitCap { required: usize, cap: usize },

    #[error("lattice has {points} points, above the enumeration cap of {cap}")]
    EnumerationCap { points: usize, cap: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
