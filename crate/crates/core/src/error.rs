use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degree bounds differ: {0} vs {1}")]
    DegreeMismatch(u32, u32),
    #[error("cannot invert a polynomial with zero constant term")]
    SingularNormalization,
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("register size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("CNOT control and target must differ (got {0})")]
    SameQubit(usize),
    #[error("unsupported number of Shor-state verifications: {0} (expected 0, 1 or 2)")]
    InvalidVerifications(usize),
    #[error("syndrome repeats must be at least 1")]
    InvalidRepeats,
    #[error("acceptance probability has zero constant term; experiment is degenerate")]
    ExperimentDegenerate,
    #[error("dense oracle supports at most {max} qubits, circuit uses {n}")]
    CapacityExceeded { n: usize, max: usize },
    #[error("no sample was accepted; Monte-Carlo result is inconclusive")]
    Inconclusive,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
