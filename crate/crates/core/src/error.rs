use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid rational literal {0:?}")]
    ParseScalar(String),

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("point {index} is not in the box")]
    PointOutsideBox { index: usize },

    #[error("duplicate point at positions {first} and {second}")]
    DuplicatePoint { first: usize, second: usize },

    #[error("point set is empty")]
    EmptyPointSet,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enclosure not certified within {0} refinements")]
    NotCertified(usize),

    #[error("bound value overflows double precision")]
    Overflow,

    #[error("palette is empty")]
    EmptyPalette,

    #[error("polynomial is not multilinear")]
    NotMultilinear,

    #[error("unknown search strategy {0:?}")]
    UnknownStrategy(String),

    #[error("coordinate set size {box_q} does not match t = {t}")]
    BoxSizeMismatch { box_q: usize, t: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
