use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("monomial {exponents:?} exceeds target bidegree ({deg_st}, {deg_xy})")]
    ExponentOverflow {
        exponents: Vec<u32>,
        deg_st: u32,
        deg_xy: u32,
    },
    #[error("term {exponents:?} is not of bidegree ({deg_st}, {deg_xy})")]
    BidegreeViolation {
        exponents: Vec<u32>,
        deg_st: u32,
        deg_xy: u32,
    },
    #[error("monomial basis degree {0} is not supported (expected 1 or 2)")]
    UnsupportedDegree(u32),
    #[error("surface is not a rational normal scroll")]
    NotAScroll,
    #[error("degree pattern mismatch: {0}")]
    DegreeMismatch(String),
    #[error("not a quadratic form on this surface: {0}")]
    NotAQuadraticForm(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NonSymmetric(f64),
    #[error("matrix is not in the Gram fiber (residual {0:e})")]
    NotInFiber(f64),
    #[error("target rank {rank} must be smaller than the matrix size {size}")]
    RankTooLarge { rank: usize, size: usize },
    #[error("{failed} of {total} paths failed without diverging")]
    PathFailureBudgetExceeded { failed: usize, total: usize },
    #[error("alternating projections did not converge: fiber gap {fiber_gap:e}, psd gap {psd_gap:e}")]
    IterationBudgetExceeded { fiber_gap: f64, psd_gap: f64 },
    #[error("rank reduction stalled at rank {achieved} (target {target})")]
    StuckAboveTarget { achieved: usize, target: usize },
    #[error("diagonal entry {0} has odd degree")]
    OddDiagonalDegree(usize),
    #[error("entry ({i}, {j}) has degree {got}, expected {expected}")]
    OffDiagonalDegreeMismatch {
        i: usize,
        j: usize,
        got: u32,
        expected: u32,
    },
    #[error("matrix polynomial is not positive semidefinite at (s, t) = ({s}, {t}): eigenvalue {eigenvalue:e}")]
    NotPsd { s: f64, t: f64, eigenvalue: f64 },
    #[error("binary form is not nonnegative")]
    NotNonnegative,
    #[error("apex coefficient {0} is not positive")]
    ApexCoefficientNotPositive(String),
    #[error("verification failed: residual {0:e}")]
    VerificationFailed(f64),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
