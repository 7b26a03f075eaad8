use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, PkbError>;

#[derive(Debug, Error)]
pub enum PkbError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input file. `line` and `column` are 1-based; `column` is
    /// `None` when the problem concerns a whole line.
    #[error("{path}: line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        path: PathBuf,
        line: usize,
        column: Option<usize>,
        message: String,
    },

    #[error("duplicate gene id `{0}`")]
    DuplicateGene(String),

    #[error("duplicate sample id `{0}`")]
    DuplicateSample(String),

    #[error("duplicate pathway name `{0}`")]
    DuplicatePathway(String),

    #[error("empty expression matrix")]
    EmptyMatrix,

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("invalid pathway collection: {0}")]
    InvalidPathways(String),

    #[error("no pathway in {0} shares a gene with the expression data")]
    NoPathways(PathBuf),

    #[error("sample `{0}` has no label")]
    MissingLabel(String),

    #[error("label file names unknown sample `{0}`")]
    UnknownSample(String),

    #[error("label `{label}` for sample `{sample}` is not one of 1, -1, 0")]
    InvalidLabel { sample: String, label: String },

    #[error("labels contain a single class; both +1 and -1 are required")]
    SingleClass,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("coordinate descent did not converge after {sweeps} sweeps")]
    NotConverged { sweeps: usize, last_iterate: Vec<f64> },

    #[error("pathway {pathway}: {source}")]
    InPathway {
        pathway: usize,
        #[source]
        source: Box<PkbError>,
    },

    #[error("line search direction is identically zero")]
    ZeroDirection,

    #[error("fold {fold} contains a single class; cannot stratify")]
    Stratification { fold: usize },

    #[error("expression data is missing gene `{0}` required by the model")]
    MissingGene(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PkbError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PkbError::Io {
            path: path.into(),
            source,
        }
    }
}
