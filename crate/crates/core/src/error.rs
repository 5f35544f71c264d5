use thiserror::Error;

/// Errors produced while building, compiling, simulating or reporting an encoding run.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InputDomain(String),

    #[error("value {value} at index {index} does not fit in {bits} bits")]
    ValueOutOfRange { index: usize, value: u64, bits: u32 },

    #[error("all-zero data set")]
    AllZeroData,

    #[error("zero success probability")]
    ZeroSuccessProbability,

    #[error("ancillae entangled: weight {leakage:e} outside the ancilla ground state")]
    AncillaeEntangled { leakage: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code used by the command-line front-end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InputDomain(_)
            | Error::ValueOutOfRange { .. }
            | Error::Configuration(_)
            | Error::Parse(_) => 2,
            Error::AllZeroData | Error::ZeroSuccessProbability => 3,
            Error::AncillaeEntangled { .. } | Error::Internal(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
