use thiserror::Error;

/// Errors shared across the crate. Parse errors carry the 1-based line of the
/// offending input; capacity errors report how many bits the value would need.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed walk: {0}")]
    MalformedWalk(String),

    #[error("walk endpoints do not match request: {0}")]
    EndpointMismatch(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{context} needs {required_bits} bits and does not fit the 64-bit scaled domain")]
    Capacity { required_bits: u64, context: String },

    #[error("instance too large for exhaustive enumeration: {edges} edges exceeds the limit of {limit}")]
    OracleLimit { edges: usize, limit: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
