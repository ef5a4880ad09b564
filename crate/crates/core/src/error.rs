use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graphs and permutations need at least one vertex")]
    EmptyVertexSet,
    #[error("{n} vertices exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("not a bijection")]
    NotABijection,
    #[error("bit source exhausted before the upper triangle was filled")]
    ShortBitSource,
}

/// Failure to decode a wire value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("invalid hex: {0}")]
    Hex(String),
    #[error("truncated: need at least {needed} bytes, found {found}")]
    Truncated { needed: usize, found: usize },
    #[error("vertex count must be positive")]
    ZeroVertices,
    #[error("{n} vertices exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("malformed length: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("nonzero padding bits")]
    NonZeroPadding,
    #[error("not a bijection")]
    NotABijection,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KdfError {
    #[error("login must be 1..=256 bytes, got {0}")]
    LoginLength(usize),
    #[error("password must be 1..=1024 bytes, got {0}")]
    PasswordLength(usize),
    #[error("graph size {0} outside 8..=1024")]
    GraphSize(usize),
    #[error("unknown hash id {0:?}")]
    UnknownHash(String),
    #[error("rejection sampling exceeded its retry cap")]
    SamplingExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error("commitment has {found} vertices, expected {expected}")]
    CommitmentSize { expected: usize, found: usize },
    #[error("response has {found} points, expected {expected}")]
    ResponseSize { expected: usize, found: usize },
    #[error("no commitment is awaiting a response")]
    NoPendingRound,
    #[error("a commitment is already awaiting a challenge")]
    RoundInProgress,
    #[error("challenge must be 1 or 2, got {0}")]
    BadChallenge(u8),
    #[error("session needs 1..=64 rounds, got {0}")]
    RoundCount(usize),
}
