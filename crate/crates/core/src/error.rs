use thiserror::Error;

/// A single violated invariant found while validating a geometry.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Violation {
    pub factor: usize,
    pub rule: &'static str,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "factor {}: {}: {}", self.factor, self.rule, self.detail)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate lattice: determinant is zero")]
    DegenerateLattice,

    #[error("expected {expected} vectors of length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("zero vector has no primitivity")]
    ZeroVector,

    #[error("weights {weights:?} are not well-formed: {reason}")]
    NotWellFormed { weights: Vec<u64>, reason: String },

    #[error("invalid geometry: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGeometry(Vec<Violation>),

    #[error("{what} index {index} out of range 0..{len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("curve class {0:?} is not an effective nonzero class for this geometry")]
    BadDegree(Vec<u64>),

    #[error("degree {degree:?} has zero tangency with divisor D{divisor}")]
    ZeroTangency { degree: Vec<u64>, divisor: usize },

    #[error("curve not rigid/maximal: {0}")]
    Structural(String),

    #[error("invalid tropical tree: {0}")]
    InvalidTree(String),

    #[error("vertex {vertex} has no incoming edges")]
    EmptyVertex { vertex: usize },

    #[error("geometry mismatch between operands")]
    GeometryMismatch,

    #[error("exponent {exponent:?} outside the truncation box {bound:?}")]
    ExponentOutOfRange { exponent: Vec<u32>, bound: Vec<u32> },

    #[error("leading scalar of a linear factor is zero")]
    ZeroLeadingScalar,

    #[error("extracted coefficient for degree {degree:?} is not a pure lambda^{power} monomial: {found}")]
    NotLambdaPure {
        degree: Vec<u64>,
        power: i32,
        found: String,
    },

    #[error("config error at {path}: {reason}")]
    Config { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
