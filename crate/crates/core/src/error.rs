use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the core algorithms.
///
/// Variants are grouped by how a caller is expected to react: invalid
/// arguments, size guards that refused an expensive enumeration, and
/// numerical failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 251]")]
    NotPrime(u32),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u8, u8),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector length {0} is not even")]
    OddLength(usize),
    #[error("coordinate {value} out of range for modulus {modulus}")]
    CoordinateOutOfRange { value: u32, modulus: u8 },
    #[error("generators are linearly dependent")]
    LinearlyDependent,
    #[error("subspace is not self-orthogonal")]
    NotSelfOrthogonal,
    #[error("no self-orthogonal subspace of dimension {dim} exists in F_d^{ambient}")]
    DimensionTooLarge { dim: usize, ambient: usize },
    #[error("invalid code parameters: {0}")]
    InvalidCode(String),
    #[error("unknown code name `{0}`")]
    UnknownCode(String),
    #[error("invalid probability: {0}")]
    InvalidProbability(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("{what}: {needed} exceeds the enumeration guard {limit}")]
    GuardExceeded {
        what: &'static str,
        needed: u128,
        limit: u128,
    },
    #[error("integer overflow while counting {0}")]
    Overflow(&'static str),
    #[error("optimizer did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for the size guards (enumeration limits, dense-matrix caps).
    pub fn is_guard(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. } | Error::Overflow(_))
    }
}
