use thiserror::Error;

use crate::types::CameraId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown camera {0}")]
    UnknownCamera(CameraId),

    #[error("empty feature list")]
    EmptyFeatureList,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite feature value")]
    NonFiniteFeature,

    #[error("missing {0} pairs for statistics")]
    MissingClass(&'static str),

    #[error("degenerate statistics: mu_n ({mu_n}) must exceed mu_p ({mu_p})")]
    DegenerateStatistics { mu_p: f64, mu_n: f64 },

    #[error("partition covers {actual} nodes, graph has {expected}")]
    PartitionSize { expected: usize, actual: usize },

    #[error("invalid similarity graph: {0}")]
    InvalidGraph(String),

    #[error("instance too large for exact solver: {n} nodes, limit {limit}")]
    TooLargeForExact { n: usize, limit: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("empty training data")]
    EmptyTrainingData,

    #[error("tracklet without identity label passed to the sampler")]
    MissingLabel,

    #[error("insufficient diversity: no valid {0} pair exists")]
    InsufficientDiversity(&'static str),

    #[error("no cross-camera positives within the sampling window")]
    NoCrossCameraPositives,

    #[error("mixed cameras in single-camera input: {0} and {1}")]
    MixedCameras(CameraId, CameraId),

    #[error("malformed structure: {0}")]
    Malformed(String),

    #[error("inconsistent camera sets: hypothesis camera {0} not present in truth")]
    InconsistentCameras(CameraId),
}
