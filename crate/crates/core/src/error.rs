use thiserror::Error;

/// Errors produced by state construction, simulation, sampling and the protocol.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight p = {0} is outside the open interval 0<p<1")]
    InvalidWeight(f64),

    #[error("qubit count {0} is outside 1..=64")]
    InvalidQubitCount(usize),

    #[error("invalid basis string {0:?}: expected a non-empty string of '0'/'1' of length at most 64")]
    InvalidBasisString(String),

    #[error("{n} qubits exceeds the dense capacity of {cap} qubits")]
    Capacity { n: usize, cap: usize },

    #[error("qubit index {qubit} out of range 1..={n}")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("distribution is not normalized: total probability {0}")]
    Unnormalized(f64),

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("measurement record is empty")]
    EmptyRecord,

    #[error("signal amplitude sqrt(p(1-p)) = {amplitude:.4} is below the degeneracy threshold {threshold}")]
    NearDegenerate { amplitude: f64, threshold: f64 },

    #[error("{stray} of {total} z-basis shots fall outside the two-component family")]
    OutsideFamily { stray: u64, total: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed record: {0}")]
    MalformedRecord(String),
}

pub type Result<T> = std::result::Result<T, Error>;
