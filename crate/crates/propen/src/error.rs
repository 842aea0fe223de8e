use ndarray::Array1;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("matched dataset is empty; relax delta_x / delta_y to admit more pairs")]
    EmptyMatchedDataset,

    #[error("non-finite loss at epoch {epoch}: {loss}")]
    NonFiniteLoss { epoch: usize, loss: f64 },

    #[error("index {index} out of range for {len} designs")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("seed {index} has no matches")]
    UnmatchedSeed { index: usize },

    #[error("design set has no property values")]
    MissingProperties,

    #[error("mix_beta > 0 requires a mix target")]
    MissingMixTarget,

    #[error("xy2xy optimization requires the seed's property value")]
    MissingSeedProperty,

    #[error("non-finite state at step {step}; partial trajectory has {} states", partial.len())]
    NonFiniteState { step: usize, partial: Vec<Array1<f64>> },

    #[error("no improving samples around the seed (seed may be at a maximum)")]
    NoImprovingSamples,

    #[error("malformed rows at lines {lines:?}: {reason}")]
    MalformedRows { lines: Vec<usize>, reason: String },

    #[error("model file is corrupt: {0}")]
    CorruptModelFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
