use thiserror::Error;

/// Errors raised by tableau, geometry, circuit, and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a tableau needs at least one qubit")]
    NoQubits,
    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("system size {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("system size {n} is too small (need at least {min})")]
    SystemTooSmall { n: usize, min: usize },
    #[error("region index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("regions overlap at qubit {0}")]
    OverlappingRegions(usize),
    #[error("region size {size} invalid for {n} sites")]
    InvalidRegionSize { size: usize, n: usize },
    #[error("distance {r} invalid for {n} sites")]
    InvalidDistance { r: usize, n: usize },
    #[error("layer index m = {m} outside 1..={max}")]
    InvalidLayer { m: usize, max: usize },
    #[error("fit needs at least {needed} points, got {got}")]
    Underdetermined { needed: usize, got: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
