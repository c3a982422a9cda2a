use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("invalid class: {0}")]
    InvalidClass(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("not an integer: {0}")]
    NotIntegral(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("(w, Sigma) is not an allowable pair: {0}")]
    NotAllowable(String),
    #[error("invalid series: {0}")]
    InvalidSeries(String),
    #[error("malformed split series: {0}")]
    MalformedSplit(String),
    #[error("adjunction inequality violated: {0}")]
    Adjunction(String),
    #[error("parameter out of range: {0}")]
    Domain(String),
    #[error("b+ = 1 manifolds need a chamber choice, which is not modeled: {0}")]
    Chamber(String),
    #[error("invalid gluing: {0}")]
    Gluing(String),
    #[error("marker mismatch: {0}")]
    Marker(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("insufficient reference data for alpha = {0}")]
    InsufficientData(usize),
    #[error("inconsistent references for alpha = {0}")]
    InconsistentReferences(usize),
    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),
    #[error("stored catalog entry differs from its recipe: {0}")]
    CatalogMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
