//! Error kinds shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("non-finite value: {0}")]
    Numerics(String),
    #[error("chart mismatch: {0}")]
    Chart(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("rank error: {0}")]
    Rank(String),
    #[error("inconsistent data: {0}")]
    Consistency(String),
    #[error("symmetry precondition violated: {0}")]
    SymmetryPrecondition(String),
    #[error("projector invariant violated: {0}")]
    Projector(String),
    #[error("section vanishes: min |s| = {min_norm:e} below threshold {threshold:e}")]
    VanishingSection { min_norm: f64, threshold: f64 },
    #[error("homotopy does not respect the boundary: {0}")]
    Homotopy(String),
    #[error("zero is not transversal: {0}")]
    Transversality(String),
    #[error("zero on the boundary: {0}")]
    BoundaryZero(String),
    #[error("form is not closed: {0}")]
    Closedness(String),
    #[error("no sign convention closes the pair: {0}")]
    SignConvention(String),
    #[error("bump profile invalid: {0}")]
    Bump(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("restriction is not a chain map: {0}")]
    ChainMap(String),
    #[error("not a cochain complex: {0}")]
    Complex(String),
    #[error("restriction is not surjective: {0}")]
    Surjectivity(String),
}

pub type Result<T> = std::result::Result<T, Error>;
