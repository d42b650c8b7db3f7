use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    /// Three blocks, one from each set partition, share two or more elements.
    #[error("blocks {blocks:?} share elements {elements:?}")]
    IntersectionViolation {
        blocks: [usize; 3],
        elements: Vec<usize>,
    },

    #[error("block of size {size} exceeds vector dimension {dim}")]
    BlockTooLarge { size: usize, dim: usize },

    #[error("search exceeded the node budget of {budget}")]
    LimitExceeded { budget: u64 },

    #[error("input too large: {0}")]
    ScaleExceeded(String),

    #[error("witness evaluation vanished; no lower bound can be concluded")]
    WitnessVanished,

    #[error("per-valid-set coefficients differ: {0}")]
    CancellationDetected(String),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("parse error: {0}")]
    Parse(String),
}
