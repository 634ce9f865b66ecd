//! Multi-camera multi-target tracking with locality-aware appearance metrics.
//!
//! Detections are linked into tracklets, tracklets into single-camera
//! trajectories, and trajectories into cross-camera tracks. Each stage solves
//! a correlation-clustering problem inside a temporal sliding window. Pair
//! similarities come either from a distance-normalized Euclidean baseline or
//! from a small pair-classifier network trained on pairs drawn from a local
//! neighborhood (same camera within a short window, or different cameras
//! within a longer window).

pub mod cluster;
pub mod error;
pub mod eval;
pub mod featstore;
pub mod metricnet;
pub mod par;
pub mod pipeline;
pub mod sampler;
pub mod simgen;
pub mod topology;
pub mod types;

pub use error::{Error, Result};
pub use par::Exec;
pub use topology::{CameraTopology, Edge, Transition};
pub use types::{CameraId, Detection, FeatureVector, Frame, IdentityId, Track, Tracklet, Trajectory};
