use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum OjsError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("antenna regime violated: {0}")]
    AntennaRegimeViolation(String),

    #[error("defensible dimensions k*nj = {defensible} are fewer than Eve's {ne} antennas")]
    DefensibleDimensionViolation { defensible: usize, ne: usize },

    #[error("matrix is rank deficient (smallest singular value {smallest_singular:e})")]
    RankDeficient { smallest_singular: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("subspace already spans the whole ambient space")]
    FullSpace,

    #[error("cannot choose {k} elements from a pool of {s}")]
    KTooLarge { k: usize, s: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("jamming Gram matrix at Eve is singular")]
    SingularJammingGram,

    #[error("rate-loss target must be positive, got {0}")]
    NonpositiveDelta(f64),

    #[error("parameter `{name}` must be positive, got {value}")]
    NonpositiveParameter { name: &'static str, value: f64 },

    #[error("formula value {0:e} does not fit in a u64 pool size")]
    Overflow(f64),

    #[error("DoF window needs at least two distinct powers")]
    DegenerateWindow,

    #[error("sample set is empty")]
    EmptySamples,

    #[error("{0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error(
        "exhaustive search over C({s}, {k}) = {subsets} subsets exceeds the cap of {cap}; \
         rerun with greedy selection"
    )]
    PoolTooLarge { s: usize, k: usize, subsets: u128, cap: u128 },

    #[error("experiment spec error: {0}")]
    Spec(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for OjsError {
    fn from(err: std::io::Error) -> Self {
        OjsError::Io(err.to_string())
    }
}

pub type Result<T, E = OjsError> = std::result::Result<T, E>;
