use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("identity term is not allowed in a traceless Hamiltonian")]
    IdentityTerm,

    #[error("coefficient {0} is not finite")]
    NonFiniteCoefficient(f64),

    #[error("invalid Pauli letter {0:?}")]
    InvalidLetter(char),

    #[error("qubit count must be in 1..={max}, got {n}")]
    InvalidQubitCount { n: usize, max: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{n} qubits exceeds the dense cap of {cap}")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (defect {0:e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("forward-only oracle rejects evolution time {0}")]
    NegativeTime(f64),

    #[error("oracle is in {actual} mode, operation requires {expected}")]
    ModeMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("term {0} is not diagonal in the Z basis")]
    NotDiagonal(String),

    #[error("Hamiltonian is not {k}-local (term of weight {weight})")]
    NotKLocal { k: usize, weight: usize },

    #[error("twirl depth {depth} exceeds the unrolling cap of {cap}")]
    TwirlDepthCap { depth: usize, cap: usize },

    #[error("spectrum of size {len} exceeds the enumeration cap of {cap}")]
    SpectrumTooLarge { len: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
