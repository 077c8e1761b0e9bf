use thiserror::Error;

/// Errors raised by graph loading, walk simulation, verification and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed edge line {content:?}")]
    MalformedLine { line: usize, content: String },

    #[error("line {line}: negative node id {id}")]
    NegativeNodeId { line: usize, id: i64 },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("node id {id} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { id: usize, node_count: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("split edge ({0}, {1}) is a self-pair")]
    SelfPairInSplit(usize, usize),

    #[error("edge ({u}, {v}) appears in both the {first} and {second} splits")]
    OverlappingSplits {
        u: usize,
        v: usize,
        first: &'static str,
        second: &'static str,
    },

    #[error("invalid graph container: {0}")]
    InvalidContainer(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dense analysis limited to {cap} nodes, graph has {node_count}")]
    TooLarge { node_count: usize, cap: usize },

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("operator is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("could only find {found} of {requested} negative pairs")]
    InsufficientNegatives { requested: usize, found: usize },

    #[error("empty rank list")]
    EmptyRanks,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
