//! Observation and identity-hypothesis types shared by every stage.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::featstore;

pub type CameraId = u32;
pub type Frame = u64;
pub type IdentityId = u32;

/// Fixed-length appearance descriptor with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteFeature);
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Element-wise `|self - other|`.
    pub fn abs_diff(&self, other: &FeatureVector) -> Result<FeatureVector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| (a - b).abs())
                .collect(),
        ))
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// One bounding-box observation. `identity` is only set on ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub camera_id: CameraId,
    pub frame: Frame,
    pub center: [f64; 2],
    pub identity: Option<IdentityId>,
    pub feature: FeatureVector,
}

/// Majority vote over weighted labels; ties go to the smaller id.
pub(crate) fn majority_label<I>(labels: I) -> Option<IdentityId>
where
    I: IntoIterator<Item = (IdentityId, usize)>,
{
    let mut counts: BTreeMap<IdentityId, usize> = BTreeMap::new();
    for (label, weight) in labels {
        *counts.entry(label).or_default() += weight;
    }
    let mut best: Option<(IdentityId, usize)> = None;
    for (label, count) in counts {
        if best.is_none_or(|(_, c)| count > c) {
            best = Some((label, count));
        }
    }
    best.map(|(label, _)| label)
}

/// Short single-camera fragment. `detections` index into the detection slice
/// the tracklet was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Tracklet {
    pub camera_id: CameraId,
    pub start: Frame,
    pub end: Frame,
    pub detections: Vec<usize>,
    pub feature: FeatureVector,
    pub label: Option<IdentityId>,
}

impl Tracklet {
    /// Builds a tracklet from `indices` into `source`, sorting members by frame.
    pub fn from_detections(source: &[Detection], mut indices: Vec<usize>) -> Result<Self> {
        let first = *indices
            .first()
            .ok_or_else(|| Error::Malformed("tracklet without detections".into()))?;
        let camera_id = source
            .get(first)
            .ok_or_else(|| Error::Malformed(format!("detection index {first} out of range")))?
            .camera_id;
        for &i in &indices {
            let det = source
                .get(i)
                .ok_or_else(|| Error::Malformed(format!("detection index {i} out of range")))?;
            if det.camera_id != camera_id {
                return Err(Error::MixedCameras(camera_id, det.camera_id));
            }
        }
        indices.sort_by_key(|&i| (source[i].frame, i));
        let features: Vec<&FeatureVector> = indices.iter().map(|&i| &source[i].feature).collect();
        let feature = featstore::aggregate_refs(&features)?;
        let label = majority_label(indices.iter().filter_map(|&i| source[i].identity.map(|l| (l, 1))));
        Ok(Self {
            camera_id,
            start: source[indices[0]].frame,
            end: source[*indices.last().unwrap()].frame,
            detections: indices,
            feature,
            label,
        })
    }

    pub fn len_frames(&self) -> Frame {
        self.end - self.start + 1
    }

    pub fn overlaps(&self, other: &Tracklet) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Single-camera path of one hypothesized target.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub camera_id: CameraId,
    pub tracklets: Vec<Tracklet>,
    pub feature: FeatureVector,
    pub start: Frame,
    pub end: Frame,
}

impl Trajectory {
    /// Orders tracklets by start frame and rejects mixed cameras or
    /// overlapping members.
    pub fn new(mut tracklets: Vec<Tracklet>) -> Result<Self> {
        if tracklets.is_empty() {
            return Err(Error::Malformed("trajectory without tracklets".into()));
        }
        tracklets.sort_by_key(|t| (t.start, t.end, t.detections.first().copied()));
        let camera_id = tracklets[0].camera_id;
        for t in &tracklets {
            if t.camera_id != camera_id {
                return Err(Error::MixedCameras(camera_id, t.camera_id));
            }
        }
        for pair in tracklets.windows(2) {
            if pair[0].overlaps(&pair[1]) {
                return Err(Error::Malformed(format!(
                    "overlapping tracklets [{}, {}] and [{}, {}]",
                    pair[0].start, pair[0].end, pair[1].start, pair[1].end
                )));
            }
        }
        let features: Vec<&FeatureVector> = tracklets.iter().map(|t| &t.feature).collect();
        let feature = featstore::aggregate_refs(&features)?;
        let start = tracklets[0].start;
        let end = tracklets.iter().map(|t| t.end).max().unwrap();
        Ok(Self {
            camera_id,
            tracklets,
            feature,
            start,
            end,
        })
    }

    /// Majority identity over member detections.
    pub fn label(&self) -> Option<IdentityId> {
        majority_label(
            self.tracklets
                .iter()
                .filter_map(|t| t.label.map(|l| (l, t.detections.len()))),
        )
    }

    pub fn detection_count(&self) -> usize {
        self.tracklets.iter().map(|t| t.detections.len()).sum()
    }

    pub fn overlaps(&self, other: &Trajectory) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Cross-camera identity hypothesis. A camera may appear more than once when
/// the target returns to it.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub global_id: u64,
    pub trajectories: Vec<Trajectory>,
}

impl Track {
    pub fn detection_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.trajectories
            .iter()
            .flat_map(|t| t.tracklets.iter())
            .flat_map(|t| t.detections.iter().copied())
    }
}
