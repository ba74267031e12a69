use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected two node labels, found {found} token(s)")]
    Parse { line: usize, found: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilities(String),

    #[error("unsupported security parameter {0} (supported: 16..=64)")]
    UnsupportedSecurityParameter(u32),

    #[error("public key {0} is outside the group")]
    KeyOutOfRange(u64),

    #[error("party {party} has no shared key with party {peer}")]
    MissingSharedKey { party: usize, peer: usize },

    #[error("value {value} does not fit in the group of order {modulus}")]
    ValueOutOfRange { value: u64, modulus: u64 },

    #[error("degree {degree} is outside the partition domain [{lo}, {hi}]")]
    DegreeOutOfDomain { degree: u32, lo: u32, hi: u32 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dataset not found: {0}")]
    DatasetNotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
