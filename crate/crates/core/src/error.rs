use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {message}")]
    Csv { path: PathBuf, message: String },

    #[error("{path}: file is empty")]
    EmptyFile { path: PathBuf },

    #[error("{path}: header has no column named {column:?}")]
    MissingLabelColumn { path: PathBuf, column: String },

    #[error("{path}: header differs from the first input file")]
    HeaderMismatch { path: PathBuf },

    #[error("{path}: row {row} has {found} cells, header has {expected}")]
    RaggedRow {
        path: PathBuf,
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("the label column {0:?} cannot be dropped")]
    DropLabel(String),

    #[error("column {0:?} is constant (min = max); drop single-valued columns before normalizing")]
    ConstantColumn(String),

    #[error("column {0:?} contains non-finite values; drop invalid rows first")]
    NonFiniteColumn(String),

    #[error("label {0:?} does not occur in the label column")]
    UnknownLabel(String),

    #[error("label column must be binary (0 = benign, 1 = attack), found value {0}")]
    NonBinaryLabel(f64),

    #[error("sampling: {0}")]
    Sampling(String),

    #[error("discretizer: {0}")]
    Discretizer(String),

    #[error("scorer: {0}")]
    Scorer(String),

    #[error("training {algorithm}: {message}")]
    Training {
        algorithm: &'static str,
        message: String,
    },

    #[error("feature manifest mismatch: model expects {expected:?}, table has {found:?}")]
    ManifestMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },

    #[error("row has {found} features, model expects {expected}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} predictions vs {right} labels")]
    LengthMismatch { left: usize, right: usize },

    #[error("confusion matrix is empty")]
    EmptyMatrix,

    #[error("invalid hyperparameter: {0}")]
    Hyperparams(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn training(algorithm: &'static str, message: impl Into<String>) -> Self {
        Error::Training {
            algorithm,
            message: message.into(),
        }
    }

    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage {
                stage,
                source: Box::new(other),
            },
        }
    }

    pub(crate) fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for errors caused by bad configuration or hyperparameters rather
    /// than by the data or the environment. The CLI maps these to exit code 1.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Config(_) | Error::Hyperparams(_) => true,
            Error::Stage { source, .. } | Error::Context { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
