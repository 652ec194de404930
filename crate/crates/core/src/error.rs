use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid prime set: {0}")]
    InvalidPrimeSet(String),

    #[error("{value} not an S-unit (prime factor {factor} outside the prime set)")]
    NotSUnit { value: String, factor: String },

    #[error("{0} is not in Z[1/p1,...,1/pl] for this prime set")]
    NotSInteger(String),

    #[error("values built over different prime sets")]
    PrimeMismatch,

    #[error("prime index {index} out of range for {len} primes")]
    PrimeIndex { index: usize, len: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("drift target must be positive (got {0})")]
    NonPositiveTarget(String),

    #[error("invalid step measure: {0}")]
    InvalidSigma(String),

    #[error("support goal point {point} is unreachable by any convolution power of the step measure")]
    UnreachableSupport { point: i64 },

    #[error("negative-drift hypothesis violated at p_{index} = {prime}: drift coefficient {coeff} is not negative")]
    DriftHypothesis { index: usize, prime: u64, coeff: String },

    #[error("insufficient walk length for precision {required}: achieved tail valuation {achieved}")]
    InsufficientPrecision { required: i64, achieved: i64 },

    #[error("cannot rationalize {value} within tolerance {tol} (denominator bound {bound})")]
    Rationalize { value: String, tol: String, bound: u64 },

    #[error("unknown test-function family `{name}` (known: {known})")]
    UnknownFamily { name: String, known: String },

    #[error("measure is not a probability measure (total mass {0})")]
    NotProbability(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
