use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{value} is not prime")]
    NotPrime { value: u64 },

    #[error("field element belongs to GF({actual}), expected GF({expected})")]
    FieldMismatch { expected: u64, actual: u64 },

    #[error("field GF({q}) is too small for strings of length {n}")]
    FieldTooSmall { q: u64, n: usize },

    #[error("state is not normalized (norm^2 = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },

    #[error("gate acts twice on qubit {0}")]
    RepeatedQubit(usize),

    #[error("width mismatch: circuit has {circuit} qubits, state has {state}")]
    WidthMismatch { circuit: usize, state: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("circuit code: {0}")]
    Codec(String),

    #[error("circuit text, line {line}: {message}")]
    CircuitText { line: usize, message: String },

    #[error("advice budget exceeded: {members} members but at most {budget} allowed")]
    BudgetExceeded { members: usize, budget: usize },

    #[error("duplicate member {0}")]
    DuplicateMember(String),

    #[error("measurement basis for index {index} is not orthonormal (deviation {deviation:e})")]
    MalformedBasis { index: usize, deviation: f64 },

    #[error("requested precision {requested:e} is below the supported floor {floor:e}")]
    UnsupportedPrecision { requested: f64, floor: f64 },

    #[error("synthesis failed: best error {achieved:e} did not reach {requested:e}")]
    SynthesisFailed { achieved: f64, requested: f64 },

    #[error("problem size exceeds desk scale: {0}")]
    ScaleExceeded(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("repetition count {0} must be odd")]
    EvenRepetitions(usize),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
