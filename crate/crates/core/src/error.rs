use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("indices must be strictly increasing")]
    UnsortedIndices,

    #[error("hyperplane {index} has a zero normal vector")]
    ZeroNormal { index: usize },

    #[error("hyperplanes {first} and {second} coincide")]
    DuplicateHyperplane { first: usize, second: usize },

    #[error("normal {index} has length {found}, expected {expected}")]
    LengthMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("cannot restrict to the zero subspace")]
    ZeroSubspace,

    #[error("flat has rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("maximal chain count exceeds cap {cap}")]
    ChainGuard { cap: usize },

    #[error("ground set of size {size} exceeds cap {cap}")]
    GroundSetGuard { size: usize, cap: usize },

    #[error("lattice with {size} elements exceeds cap {cap}")]
    LatticeGuard { size: usize, cap: usize },

    #[error("k-subset index mismatch: (n, k) = ({left_n}, {left_k}) vs ({right_n}, {right_k})")]
    IndexMismatch {
        left_n: usize,
        left_k: usize,
        right_n: usize,
        right_k: usize,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no rank-{k} sample found after {attempts} attempts")]
    Sampling { k: usize, attempts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
