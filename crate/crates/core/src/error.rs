use std::path::PathBuf;

/// Errors raised by every module of the crate.
///
/// [`Error::name`] gives the stable variant name that the CLI prints.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("row {0} of the affinity matrix has zero degree")]
    ZeroDegree(usize),

    #[error("eigensolver residual {residual:e} exceeds tolerance {tolerance:e}")]
    ConvergenceFailure { residual: f64, tolerance: f64 },

    #[error("lead eigenvector entry {index} is {value:e}; the affinity graph is not connected")]
    DegenerateLeadVector { index: usize, value: f64 },

    #[error("no linear region found in the epsilon scan")]
    NoLinearRegion,

    #[error("eigenvalue {index} is {value:e}, below the floor {floor:e}")]
    SmallEigenvalue { index: usize, value: f64, floor: f64 },

    #[error("label {0} selects no pixels")]
    EmptySelection(u32),

    #[error("label {label} selects {count} pixel(s); at least 2 are needed")]
    TooFewPixels { label: u32, count: usize },

    #[error("window of {window} frames exceeds the {frames} available")]
    WindowTooLarge { window: usize, frames: usize },

    #[error("block of {rows}x{cols} pixels is too small for overlap {overlap}")]
    BlockTooSmall { rows: usize, cols: usize, overlap: usize },

    #[error("regions do not partition the image: {0}")]
    InvalidPartition(String),

    #[error("header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("size mismatch: expected {expected} bytes, found {actual}")]
    SizeMismatch { expected: u64, actual: u64 },

    #[error("bad magic in {path}: {found:?}")]
    BadMagic { path: PathBuf, found: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{0}")]
    Format(String),
}

impl Error {
    /// Variant name, e.g. `"ZeroDegree"`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::ZeroDegree(_) => "ZeroDegree",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::DegenerateLeadVector { .. } => "DegenerateLeadVector",
            Error::NoLinearRegion => "NoLinearRegion",
            Error::SmallEigenvalue { .. } => "SmallEigenvalue",
            Error::EmptySelection(_) => "EmptySelection",
            Error::TooFewPixels { .. } => "TooFewPixels",
            Error::WindowTooLarge { .. } => "WindowTooLarge",
            Error::BlockTooSmall { .. } => "BlockTooSmall",
            Error::InvalidPartition(_) => "InvalidPartition",
            Error::HeaderMismatch(_) => "HeaderMismatch",
            Error::SizeMismatch { .. } => "SizeMismatch",
            Error::BadMagic { .. } => "BadMagic",
            Error::Io { .. } => "Io",
            Error::Format(_) => "Format",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
