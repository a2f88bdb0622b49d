use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {name} = {value} is not a finite value in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("error probabilities sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("memory parameter mu = {0} outside [0, 1]")]
    InvalidMemory(f64),

    #[error("operation requires a symmetric channel (p0 = p3, p1 = p2)")]
    NotSymmetric,

    #[error("string length must be between 1 and {max}, got {n}")]
    InvalidLength { n: usize, max: usize },

    #[error("{what} is limited to n <= {cap}, got n = {n}")]
    CapExceeded { what: &'static str, n: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("spectrum mass {0} deviates from 1")]
    SpectrumMass(f64),

    #[error("entropy {entropy} outside [0, {n}]")]
    EntropyOutOfRange { n: usize, entropy: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("encoding {encoding}: {source}")]
    Encoding { encoding: String, source: Box<Error> },
}

impl Error {
    /// Innermost error, looking through [`Error::Encoding`] wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Encoding { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_cap_exceeded(&self) -> bool {
        matches!(self.root(), Error::CapExceeded { .. })
    }
}
