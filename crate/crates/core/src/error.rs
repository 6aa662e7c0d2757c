use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operand sizes differ: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("{n} qubits requested, at most {max} supported")]
    TooManyQubits { n: usize, max: usize },
    #[error("qubit {qubit} out of range for a {n}-qubit register")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("line {line}: unexpected `{token}`: {reason}")]
    Parse { line: usize, token: String, reason: String },
    #[error("unsupported gadget: {0}")]
    UnsupportedGadget(String),
    #[error("no location at step {step} covering qubit {qubit}")]
    NoSuchLocation { step: usize, qubit: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
