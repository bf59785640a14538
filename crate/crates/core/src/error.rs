use thiserror::Error;

/// A 1-based block coordinate `(row block, column block)`.
pub type BlockPos = (usize, usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("index {index} out of range 1..={bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("shape mismatch: expected dimension {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("negative entry {value:e} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("matrix is not line-sum symmetric (max deviation {deviation:e})")]
    NotLineSumSymmetric { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("bad block embedding: {0}")]
    BadEmbedding(String),

    #[error("matrix is in neither S1 nor V1")]
    NotInClass,

    #[error("block {block:?} is not line-sum symmetric")]
    BlockNotLss { block: BlockPos },

    #[error("block {block:?} has an entry of the wrong sign ({value:e})")]
    NegativeBlockEntry { block: BlockPos, value: f64 },

    #[error("residual diagonal block {block} is not PSD (min eigenvalue {min_eig:e})")]
    ResidualNotPsd { block: usize, min_eig: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
