use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Input data is unusable (too short, empty, out of range).
    #[error("invalid input: {0}")]
    Input(String),

    /// A band contains no PSD bins at the available resolution.
    #[error(
        "insufficient frequency resolution: band {band} [{low_hz}, {high_hz}) Hz contains no bins at {resolution_hz} Hz spacing"
    )]
    InsufficientResolution {
        band: String,
        low_hz: f64,
        high_hz: f64,
        resolution_hz: f64,
    },

    /// An operation was applied in an invalid state, e.g. standardizing twice.
    #[error("logic error: {0}")]
    Logic(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("trial {trial_id}: {source}")]
    Trial {
        trial_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: missing header row")]
    MissingHeader { path: PathBuf },

    #[error("{path}: row {row}, column '{column}': cannot parse '{value}' as a number")]
    NonNumeric {
        path: PathBuf,
        row: usize,
        column: String,
        value: String,
    },

    #[error("{path}: row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("unsupported model format version '{found}' (expected '{expected}')")]
    Version { found: String, expected: String },

    #[error("malformed model file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_trial(self, trial_id: impl Into<String>) -> Self {
        Error::Trial {
            trial_id: trial_id.into(),
            source: Box::new(self),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, with trial/stage context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } | Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by bad user-supplied settings rather than data.
    pub fn is_usage(&self) -> bool {
        matches!(self.root(), Error::Config(_))
    }
}
