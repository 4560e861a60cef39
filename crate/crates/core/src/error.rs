use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("mask contains no object pixels")]
    EmptyMask,
    #[error("object boundary has only {points} points (need at least {min})")]
    DegenerateObject { points: usize, min: usize },
    #[error("centroid coincides with every boundary point")]
    ZeroRadius,

    #[error("invalid pipeline parameters: {0}")]
    InvalidParams(String),
    #[error("cutoff {cutoff} outside 1..={max} for {len} samples")]
    CutoffOutOfRange { cutoff: usize, len: usize, max: usize },
    #[error("signal length {len} too short (need at least {min})")]
    SignalTooShort { len: usize, min: usize },
    #[error("inverse transform has imaginary residue {residue:e} above tolerance")]
    NonHermitianSpectrum { residue: f64 },
    #[error("normal matrix of the slope fit is singular")]
    SingularNormalMatrix,

    #[error("feature index {index} out of range for contour of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("shape produced no peak features")]
    NoPeaks,
    #[error("all {kind} features coincide with the centroid")]
    ZeroNorm { kind: &'static str },

    #[error("feature counts differ (query {query}, model {model}) and strict count policy is on")]
    CountMismatchPolicyViolation { query: usize, model: usize },
    #[error("registry has no models")]
    EmptyRegistry,
    #[error("no registry model has a feature count compatible with the query")]
    NoCompatibleModel,
    #[error("invalid rotation search: {0}")]
    InvalidSearch(String),

    #[error("refusing to save an empty registry")]
    RefuseEmptyRegistry,
    #[error("unsupported registry schema version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },
    #[error("pipeline parameter mismatch: {0}")]
    ParamMismatch(String),
    #[error("duplicate class label {0:?} (enable multi-exemplar mode to allow it)")]
    DuplicateLabel(String),
    #[error("malformed model data: {0}")]
    Schema(String),

    #[error("invalid synthetic geometry: {0}")]
    InvalidGeometry(String),
    #[error("cannot decode image {path:?}: {reason}")]
    ImageFormat { path: PathBuf, reason: String },
    #[error("dataset layout error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
