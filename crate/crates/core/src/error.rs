use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid party index {party} for {parties}-party layout")]
    InvalidParty { party: usize, parties: usize },

    #[error("invalid party subset: {0}")]
    InvalidSubset(String),

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("not normalized: norm {0}")]
    NotNormalized(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("vector {0:?} is not a unit vector")]
    NotUnitVector([f64; 3]),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state is not entangled across any single-party cut")]
    NotEntangled,

    #[error("requested pair ({0}, {1}) is not among the surviving parties")]
    PairUnavailable(usize, usize),

    #[error("numeric degeneracy: {0}")]
    NumericDegeneracy(String),

    #[error("format error: {0}")]
    Format(String),
}
