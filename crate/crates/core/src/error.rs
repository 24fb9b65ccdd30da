use thiserror::Error;

/// Errors raised by the transforms, solvers, learners and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sketch dimension {k} exceeds ambient dimension {n}")]
    SketchTooLarge { k: usize, n: usize },

    #[error("malformed sparse vector: {0}")]
    MalformedSparse(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NegativeEigenvalue(f64),

    #[error("system is singular or not positive definite: {0}")]
    Singular(String),

    #[error("iteration cap of {cap} exceeded in {solver}")]
    IterationCap { solver: &'static str, cap: usize },

    #[error("dense computation refused for n = {n} (limit {limit})")]
    DenseGuard { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("trace was not produced by the analyzed configuration: {0}")]
    UnanalyzedConfig(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("run aborted at round {round}: {msg}")]
    Aborted { round: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotPowerOfTwo { .. } => "not_power_of_two",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::SketchTooLarge { .. } => "sketch_too_large",
            Error::MalformedSparse(_) => "malformed_sparse",
            Error::NonFinite(_) => "non_finite",
            Error::Asymmetric(_) => "asymmetric",
            Error::NegativeEigenvalue(_) => "negative_eigenvalue",
            Error::Singular(_) => "singular",
            Error::IterationCap { .. } => "iteration_cap",
            Error::DenseGuard { .. } => "dense_guard",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::UnanalyzedConfig(_) => "unanalyzed_config",
            Error::EmptyDataset => "empty_dataset",
            Error::Parse { .. } => "parse",
            Error::Config(_) => "config",
            Error::Aborted { .. } => "aborted",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_finite(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
