use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("missing section group `{0}`")]
    MissingGroup(String),

    #[error("section group `{0}` is defined more than once")]
    DuplicateGroup(String),

    #[error("section group `{0}` is not used by the jacket topology")]
    UnusedGroup(String),

    #[error("non-physical section {label}: {reason}")]
    NonPhysicalSection { label: String, reason: String },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error(
        "value {value} for `{param}` is off its grid; nearest grid points are {below:?} and {above:?}"
    )]
    OffGrid {
        param: String,
        value: f64,
        below: Option<f64>,
        above: Option<f64>,
    },

    #[error("wave parameter solve failed: {reason} (residual trace {trace:?})")]
    WaveSolve { reason: String, trace: Vec<f64> },

    #[error("soil profile does not cover depth {0} m below mudline")]
    SoilCoverage(f64),

    #[error("invalid soil curve in layer `{layer}`: {reason}")]
    SoilCurve { layer: String, reason: String },

    #[error("unknown load case `{0}`")]
    UnknownCase(String),

    #[error("unknown wave `{0}`")]
    UnknownWave(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("Newton iteration did not converge in {iterations} iterations (residual history {history:?})")]
    NotConverged { iterations: usize, history: Vec<f64> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("schema mismatch in {path}: field `{field}`")]
    Schema { path: PathBuf, field: String },
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::WaveSolve { .. } | Error::Singular(_) | Error::NotConverged { .. }
        )
    }

    pub fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
