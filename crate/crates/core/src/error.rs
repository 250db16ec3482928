use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported sphere dimension {0} (supported: 1..=3)")]
    UnsupportedDimension(usize),

    #[error("point is not on the unit sphere (|x| = {norm})")]
    NotUnit { norm: f64 },

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("ball packing failed: {0}")]
    Packing(String),

    #[error("bump placement failed: {0}")]
    Placement(String),

    #[error("patch supports overlap: pieces {0} and {1}")]
    OverlappingSupports(usize, usize),

    #[error("patch piece {index} is not constant outside its support: {detail}")]
    NotConstantOutsideSupport { index: usize, detail: String },

    #[error("region has no positive measure: {0}")]
    EmptyRegion(String),

    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },

    #[error("evaluation budget exceeded: {pairs} pairs > {budget}")]
    BudgetExceeded { pairs: u64, budget: u64 },

    #[error("geometric precondition violated: {0}")]
    Precondition(String),

    #[error("degree unresolved (raw = {raw}, residual = {residual}); try a larger grid")]
    UnresolvedDegree { raw: f64, residual: f64 },

    #[error("target is not a regular value: {0}")]
    NonRegularValue(String),

    #[error("linking number is ill-conditioned: {0}")]
    IllConditionedLinking(String),

    #[error("descriptor error: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
