use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("target column `{name}` must be binary after encoding, found {cardinality} categories")]
    NonBinaryTarget { name: String, cardinality: usize },

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid index set: {0}")]
    InvalidIndices(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    Empty,

    #[error("need at least two non-empty sensitive groups, found {0}")]
    InsufficientGroups(usize),

    #[error("fold {fold} is degenerate: {reason}")]
    DegenerateFold { fold: usize, reason: String },

    #[error("non-finite loss at epoch {epoch} (loss = {loss})")]
    NonFinite { epoch: usize, loss: f64 },

    #[error("exact enumeration needs {bits:.1} binary-equivalent nodes, cap is {cap}")]
    EnumerationCap { bits: f64, cap: usize },

    #[error("feature {0} was already processed")]
    Reprocessed(usize),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors caused by bad user input rather than by the data or the runtime.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::UnknownColumn(_)
                | Error::InvalidConfig(_)
                | Error::InvalidInput(_)
                | Error::InvalidIndices(_)
                | Error::Domain(_)
        )
    }
}
