use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("qubit {index} out of range for a {num_qubits}-qubit system")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit indices must be strictly increasing: {0:?}")]
    UnorderedSubset(Vec<usize>),

    #[error("system of {0} qubits exceeds the dense limit of {max} qubits", max = crate::tensor::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("matrix is not a projector (max deviation {0:e})")]
    NotProjector(f64),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("density matrix trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("density matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("zero-probability branch (probability {0:e})")]
    ZeroProbabilityBranch(f64),

    #[error("invalid system size {0}: expected an even number of qubits in the supported range")]
    InvalidSize(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid bit string: {0}")]
    InvalidBitString(String),

    #[error("GHZ base string must start with 0, got {0}")]
    NonCanonicalBase(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("state is not Bell-correlated under the given pairing (reconstruction error {0:e})")]
    NotBellCorrelated(f64),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("invalid side size {side_size} for {num_parties} parties")]
    InvalidSideSize { side_size: usize, num_parties: usize },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is malformed: {0}")]
    MalformedProgram(String),

    #[error("simplex did not converge within {0} pivots")]
    PivotLimit(usize),

    #[error("no available singlet between parties {0} and {1}")]
    NoAvailableSinglet(usize, usize),

    #[error("qubit {qubit} is not owned by party {party}")]
    QubitNotOwned { qubit: usize, party: usize },

    #[error("party {0} is out of range")]
    PartyOutOfRange(usize),

    #[error("random tape exhausted: requested {requested} bits, {remaining} remaining")]
    TapeExhausted { requested: usize, remaining: usize },

    #[error("unsupported protocol configuration: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("transcript parse error: {0}")]
    Transcript(String),
}

pub type Result<T> = std::result::Result<T, Error>;
