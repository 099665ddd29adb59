use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{context}: dimension mismatch between {left:?} and {right:?}")]
    DimMismatch {
        context: &'static str,
        left: (usize, usize, usize),
        right: (usize, usize, usize),
    },

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("tensor is not square: {rows}x{cols} frontal slices")]
    NotSquare { rows: usize, cols: usize },

    #[error("Fourier slice {slice} is numerically singular (sigma_min/sigma_max = {ratio:.3e})")]
    SingularSlice { slice: usize, ratio: f64 },

    #[error("rank collapse: Gram tensor singular at Fourier slice {slice}")]
    RankCollapse { slice: usize },

    #[error("SVD did not converge on Fourier slice {slice}")]
    SvdNoConvergence { slice: usize },

    #[error(
        "conjugate symmetry violated: max imaginary residue {residue:.3e} exceeds limit {limit:.3e}"
    )]
    SymmetryViolation { residue: f64, limit: f64 },

    #[error("t3b: bad magic bytes")]
    T3bBadMagic,

    #[error("t3b: zero dimension in header")]
    T3bZeroDim,

    #[error("t3b: truncated payload (expected {wanted} bytes)")]
    T3bTruncated { wanted: usize },

    #[error("t3b: non-finite value at linear index {index}")]
    T3bNonFinite { index: usize },

    #[error("t3b: dimensions overflow addressable size")]
    T3bOverflow,

    #[error("zero observation tensor")]
    ZeroObservation,

    #[error("empty training set")]
    EmptyTrainSet,

    #[error("invalid solver config: {0}")]
    BadConfig(String),

    #[error("training diverged at epoch {epoch}: loss {loss:.6e} > 10x initial {initial:.6e}")]
    Diverged {
        epoch: usize,
        loss: f64,
        initial: f64,
        history: Vec<f64>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
