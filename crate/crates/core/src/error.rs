use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Why a pose candidate was judged invisible.
#[derive(Debug, Clone, PartialEq)]
pub enum Invisibility {
    /// Some vertex depth interval reaches the camera plane; the box may
    /// still contain visible poses and can be split further.
    DepthCrossesCamera { lo: f64, hi: f64 },
    /// No pixel can be turned on from any pose in the box.
    EmptyImage,
}

impl std::fmt::Display for Invisibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::DepthCrossesCamera { lo, hi } => {
                write!(
                    f,
                    "vertex depth interval [{lo}, {hi}] reaches the camera plane"
                )
            }
            Self::EmptyImage => f.write_str("outer image is empty"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid interval: {0}")]
    InvalidInterval(String),

    #[error("malformed polynomial zonotope: {0}")]
    MalformedSet(String),

    #[error("factor id {0} has no value in the assignment")]
    MissingFactor(u32),

    #[error("assignment has {given} independent factors, set needs {needed}")]
    MissingIndependentFactor { needed: usize, given: usize },

    #[error("factor value {0} outside [-1, 1]")]
    FactorOutOfRange(f64),

    #[error("selector out of range: {0}")]
    IndexOutOfRange(String),

    #[error(
        "reciprocal domain [{lo}, {hi}] reaches zero or below (polygon possibly behind camera)"
    )]
    DomainCrossesPole { lo: f64, hi: f64 },

    #[error("vertex has depth {0} <= 0 in the camera frame")]
    BehindCamera(f64),

    #[error("candidate is invisible: {0}")]
    InvisibleCandidate(Invisibility),

    #[error("reference points are singular")]
    SingularReference,

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid camera: {0}")]
    InvalidCamera(String),

    #[error("image format: {0}")]
    ImageFormat(String),

    #[error("no witness pixel for polygon {polygon}, vertex {vertex}")]
    EmptyWitness { polygon: usize, vertex: usize },

    #[error("store does not match configuration: {0}")]
    StoreMismatch(String),

    #[error("store is corrupt: {0}")]
    StoreCorrupt(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
