use thiserror::Error;

use crate::substitution::ValidationReport;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("polygon is not simple: {0}")]
    NotSimple(String),

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("unknown prototile {0}")]
    UnknownPrototile(String),

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("substitution failed validation:\n{0}")]
    Validation(ValidationReport),

    #[error("predicted tile count {predicted} exceeds cap {cap}")]
    TooManyTiles { predicted: u128, cap: u128 },

    #[error("no visit order for prototile {0}")]
    MissingOrder(String),

    #[error("invalid visit order for prototile {proto}: {message}")]
    InvalidOrder { proto: String, message: String },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("evaluation depth too shallow: {0}")]
    DepthTooShallow(String),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("seed patch rejected: {0}")]
    SeedMismatch(String),

    #[error("raster resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("conditions unmet: {}", .0.join(", "))]
    ConditionsUnmet(Vec<String>),

    #[error("invalid expression {expr:?}: {message}")]
    Expression { expr: String, message: String },

    #[error("empty input: {0}")]
    Empty(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
