//! Synthetic multi-camera scenarios with controllable appearance locality.
//!
//! Each identity has a base embedding. A camera sees it through a fixed affine
//! map; in a closed topology the maps are composed edge by edge along a
//! spanning tree of the camera layout, so cameras further apart in the graph
//! distort appearance more. On top of that every identity drifts slowly in
//! feature space over time, and each detection adds white noise.
//!
//! Targets alternate between a visible dwell in one camera and an invisible
//! transition to a neighboring camera. Frames lost to `miss_rate` are treated
//! as occlusions: they are absent from both truth and detections.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::TruthRecord;
use crate::featstore;
use crate::topology::{CameraTopology, Edge, Transition};
use crate::types::{CameraId, Detection, FeatureVector, Frame, IdentityId, Tracklet};

const DRIFT_KNOT_SPACING: Frame = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    Chain,
    Ring,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameRateMode {
    Normal,
    /// Only every `sparse_stride`-th frame is observed.
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub cameras: u32,
    pub layout: LayoutKind,
    /// Edges for [`LayoutKind::Custom`], as camera id pairs.
    pub custom_edges: Vec<(CameraId, CameraId)>,
    pub identities: u32,
    pub duration: Frame,
    pub feature_dim: usize,
    /// Standard deviation of identity base embeddings.
    pub identity_spread: f64,
    /// Strength of the per-edge affine appearance change.
    pub camera_perturb: f64,
    /// Drift standard deviation accumulated over 1000 frames.
    pub temporal_drift: f64,
    /// Per-detection feature noise standard deviation.
    pub feature_noise: f64,
    /// Half-width of the uniform center jitter.
    pub detection_noise: f64,
    pub dwell_min: Frame,
    pub dwell_max: Frame,
    pub transition_mean: f64,
    pub transition_spread: f64,
    pub miss_rate: f64,
    pub frame_rate_mode: FrameRateMode,
    pub sparse_stride: Frame,
    /// Targets move between any pair of cameras and appearance maps are drawn
    /// independently per camera.
    pub open_topology: bool,
    pub field_width: f64,
    pub field_height: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    /// The standard scenario: 4-camera chain, 20 identities, 5000 frames,
    /// 16-dim features, 5% misses.
    fn default() -> Self {
        Self {
            cameras: 4,
            layout: LayoutKind::Chain,
            custom_edges: Vec::new(),
            identities: 20,
            duration: 5000,
            feature_dim: 16,
            identity_spread: 1.0,
            camera_perturb: 0.6,
            temporal_drift: 0.3,
            feature_noise: 0.3,
            detection_noise: 2.0,
            dwell_min: 80,
            dwell_max: 200,
            transition_mean: 200.0,
            transition_spread: 180.0,
            miss_rate: 0.05,
            frame_rate_mode: FrameRateMode::Normal,
            sparse_stride: 25,
            open_topology: false,
            field_width: 1920.0,
            field_height: 1080.0,
            speed_min: 1.0,
            speed_max: 3.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.cameras == 0 || self.identities == 0 || self.duration == 0 || self.feature_dim == 0 {
            return bad("cameras, identities, duration and feature_dim must be positive");
        }
        if !(0.0..=1.0).contains(&self.miss_rate) {
            return bad("miss_rate must lie in [0, 1]");
        }
        if self.dwell_min == 0 || self.dwell_min > self.dwell_max {
            return bad("dwell range must satisfy 0 < dwell_min <= dwell_max");
        }
        if !(self.transition_mean > 0.0)
            || !(self.transition_spread >= 0.0)
            || self.transition_spread >= self.transition_mean
        {
            return bad("transition times must satisfy 0 <= spread < mean");
        }
        for v in [
            self.identity_spread,
            self.camera_perturb,
            self.temporal_drift,
            self.feature_noise,
            self.detection_noise,
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad("noise and spread parameters must be finite and non-negative");
            }
        }
        if !(self.field_width > 0.0 && self.field_height > 0.0) {
            return bad("field size must be positive");
        }
        if !(self.speed_min >= 0.0 && self.speed_min <= self.speed_max) {
            return bad("speed range must satisfy 0 <= speed_min <= speed_max");
        }
        if self.frame_rate_mode == FrameRateMode::Sparse && self.sparse_stride == 0 {
            return bad("sparse_stride must be positive");
        }
        if self.layout == LayoutKind::Custom {
            for &(a, b) in &self.custom_edges {
                if a == b || a == 0 || b == 0 || a > self.cameras || b > self.cameras {
                    return bad("custom edges must join two distinct cameras in 1..=cameras");
                }
            }
        }
        Ok(())
    }

    pub fn transition(&self) -> Transition {
        Transition {
            mean: self.transition_mean,
            spread: self.transition_spread,
        }
    }

    /// Physical camera layout; locality is defined on this graph.
    pub fn layout_topology(&self) -> CameraTopology {
        let t = self.transition();
        match self.layout {
            LayoutKind::Chain => CameraTopology::chain(self.cameras, t),
            LayoutKind::Ring => CameraTopology::ring(self.cameras, t),
            LayoutKind::Custom => CameraTopology::new(
                1..=self.cameras,
                self.custom_edges
                    .iter()
                    .map(|&(a, b)| Edge { a, b, transition: t })
                    .collect(),
            ),
        }
    }

    /// Graph targets actually move on.
    pub fn movement_topology(&self) -> CameraTopology {
        if self.open_topology {
            CameraTopology::complete(1..=self.cameras, self.transition())
        } else {
            self.layout_topology()
        }
    }
}

/// Generated ground truth plus detections. Detections keep their identity
/// labels so training and evaluation can use them.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SimConfig,
    pub topology: CameraTopology,
    pub truth: Vec<TruthRecord>,
    pub detections: Vec<Detection>,
}

impl Scenario {
    /// First frame of the test split (the last 20% of frames).
    pub fn split_frame(&self) -> Frame {
        self.config.duration * 4 / 5
    }

    pub fn layout(&self) -> CameraTopology {
        self.config.layout_topology()
    }

    pub fn train_detections(&self) -> Vec<Detection> {
        let split = self.split_frame();
        self.detections.iter().filter(|d| d.frame < split).cloned().collect()
    }

    pub fn test_detections(&self) -> Vec<Detection> {
        let split = self.split_frame();
        self.detections.iter().filter(|d| d.frame >= split).cloned().collect()
    }

    pub fn test_truth(&self) -> Vec<TruthRecord> {
        let split = self.split_frame();
        self.truth.iter().filter(|t| t.frame >= split).cloned().collect()
    }

    /// Radius within which a hypothesized center matches a true one.
    pub fn match_radius(&self) -> f64 {
        (3.0 * self.config.detection_noise).max(1e-6)
    }

    pub fn identity_count(&self) -> usize {
        self.truth.iter().map(|t| t.identity).collect::<BTreeSet<_>>().len()
    }
}

/// Affine appearance map `x -> m x + offset`, `m` row-major.
#[derive(Debug, Clone)]
struct CameraMap {
    m: Vec<f64>,
    offset: Vec<f64>,
}

impl CameraMap {
    fn identity(dim: usize) -> Self {
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self {
            m,
            offset: vec![0.0; dim],
        }
    }

    fn perturbation(dim: usize, strength: f64, spread: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut map = Self::identity(dim);
        let scale = strength / (dim as f64).sqrt();
        for v in map.m.iter_mut() {
            *v += scale * normal(rng);
        }
        for v in map.offset.iter_mut() {
            *v = strength * spread * normal(rng);
        }
        map
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let dim = x.len();
        (0..dim)
            .map(|i| {
                let row = &self.m[i * dim..(i + 1) * dim];
                row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.offset[i]
            })
            .collect()
    }

    /// `self` after `inner`.
    fn compose(&self, inner: &CameraMap) -> CameraMap {
        let dim = self.offset.len();
        let mut m = vec![0.0; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let a = self.m[i * dim + k];
                for j in 0..dim {
                    m[i * dim + j] += a * inner.m[k * dim + j];
                }
            }
        }
        CameraMap {
            m,
            offset: self.apply(&inner.offset),
        }
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

const STREAM_CAMERAS: u64 = 1;
const STREAM_IDENTITIES: u64 = 2;
const STREAM_WALK_BASE: u64 = 1 << 32;

fn camera_maps(cfg: &SimConfig) -> BTreeMap<CameraId, CameraMap> {
    let dim = cfg.feature_dim;
    let mut rng = stream(cfg.seed, STREAM_CAMERAS);
    let layout = cfg.layout_topology();
    let mut maps = BTreeMap::new();
    if cfg.open_topology {
        for &c in layout.cameras() {
            maps.insert(c, CameraMap::perturbation(dim, cfg.camera_perturb, cfg.identity_spread, &mut rng));
        }
        return maps;
    }
    // Spanning-tree composition from the lowest camera of each component.
    for &root in layout.cameras() {
        if maps.contains_key(&root) {
            continue;
        }
        maps.insert(root, CameraMap::identity(dim));
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            for n in layout.neighbors(c).expect("camera from layout") {
                if maps.contains_key(&n) {
                    continue;
                }
                let edge = CameraMap::perturbation(dim, cfg.camera_perturb, cfg.identity_spread, &mut rng);
                let composed = edge.compose(&maps[&c]);
                maps.insert(n, composed);
                queue.push_back(n);
            }
        }
    }
    maps
}

struct IdentityModel {
    base: Vec<f64>,
    // Drift at multiples of DRIFT_KNOT_SPACING.
    knots: Vec<Vec<f64>>,
}

impl IdentityModel {
    fn drift(&self, frame: Frame) -> Vec<f64> {
        let k = (frame / DRIFT_KNOT_SPACING) as usize;
        let frac = (frame % DRIFT_KNOT_SPACING) as f64 / DRIFT_KNOT_SPACING as f64;
        let a = &self.knots[k.min(self.knots.len() - 1)];
        let b = &self.knots[(k + 1).min(self.knots.len() - 1)];
        a.iter().zip(b).map(|(x, y)| x + frac * (y - x)).collect()
    }
}

fn identity_models(cfg: &SimConfig) -> Vec<IdentityModel> {
    let mut rng = stream(cfg.seed, STREAM_IDENTITIES);
    let knots = (cfg.duration / DRIFT_KNOT_SPACING + 2) as usize;
    let step = cfg.temporal_drift * (DRIFT_KNOT_SPACING as f64 / 1000.0).sqrt();
    (0..cfg.identities)
        .map(|_| {
            let base = (0..cfg.feature_dim).map(|_| cfg.identity_spread * normal(&mut rng)).collect();
            let mut cur = vec![0.0; cfg.feature_dim];
            let mut path = Vec::with_capacity(knots);
            for _ in 0..knots {
                path.push(cur.clone());
                for v in cur.iter_mut() {
                    *v += step * normal(&mut rng);
                }
            }
            IdentityModel { base, knots: path }
        })
        .collect()
}

/// Deterministic scenario for a validated configuration.
pub fn generate(cfg: &SimConfig) -> Result<Scenario> {
    cfg.validate()?;
    let movement = cfg.movement_topology();
    if let Err(v) = movement.validate() {
        return Err(Error::InvalidConfig(format!("invalid topology: {}", v[0])));
    }
    let maps = camera_maps(cfg);
    let models = identity_models(cfg);
    let cameras: Vec<CameraId> = movement.cameras().iter().copied().collect();

    let mut truth = Vec::new();
    let mut detections = Vec::new();
    for (idx, model) in models.iter().enumerate() {
        let identity = idx as IdentityId + 1;
        let mut rng = stream(cfg.seed, STREAM_WALK_BASE + idx as u64);
        let mut t: Frame = rng.random_range(0..cfg.dwell_max);
        let mut cam = cameras[rng.random_range(0..cameras.len())];
        let appearance: BTreeMap<CameraId, Vec<f64>> =
            maps.iter().map(|(&c, m)| (c, m.apply(&model.base))).collect();

        while t < cfg.duration {
            let dwell = rng.random_range(cfg.dwell_min..=cfg.dwell_max);
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let speed = rng.random_range(cfg.speed_min..=cfg.speed_max);
            let mut pos = [
                rng.random_range(0.0..cfg.field_width),
                rng.random_range(0.0..cfg.field_height),
            ];
            let mut vel = [speed * angle.cos(), speed * angle.sin()];
            for frame in t..(t + dwell).min(cfg.duration) {
                if frame > t {
                    for k in 0..2 {
                        let limit = if k == 0 { cfg.field_width } else { cfg.field_height };
                        pos[k] += vel[k];
                        if pos[k] < 0.0 {
                            pos[k] = -pos[k];
                            vel[k] = -vel[k];
                        } else if pos[k] > limit {
                            pos[k] = 2.0 * limit - pos[k];
                            vel[k] = -vel[k];
                        }
                    }
                }
                let missed = rng.random_bool(cfg.miss_rate);
                let observed = match cfg.frame_rate_mode {
                    FrameRateMode::Normal => true,
                    FrameRateMode::Sparse => frame % cfg.sparse_stride == 0,
                };
                // Draw jitter and noise unconditionally so the random stream
                // does not depend on which frames are kept.
                let jitter = [
                    rng.random_range(-cfg.detection_noise..=cfg.detection_noise),
                    rng.random_range(-cfg.detection_noise..=cfg.detection_noise),
                ];
                let noise: Vec<f64> = (0..cfg.feature_dim).map(|_| cfg.feature_noise * normal(&mut rng)).collect();
                if missed || !observed {
                    continue;
                }
                let drift = model.drift(frame);
                let values: Vec<f64> = appearance[&cam]
                    .iter()
                    .zip(&drift)
                    .zip(&noise)
                    .map(|((a, d), n)| a + d + n)
                    .collect();
                truth.push(TruthRecord {
                    camera_id: cam,
                    frame,
                    identity,
                    center: pos,
                });
                detections.push(Detection {
                    camera_id: cam,
                    frame,
                    center: [pos[0] + jitter[0], pos[1] + jitter[1]],
                    identity: Some(identity),
                    feature: FeatureVector::new(values)?,
                });
            }

            let neighbors: Vec<CameraId> = movement.neighbors(cam)?.into_iter().collect();
            let (next, transition) = if neighbors.is_empty() {
                (cam, cfg.transition())
            } else {
                let n = neighbors[rng.random_range(0..neighbors.len())];
                (n, movement.transition(cam, n).expect("neighbor edge"))
            };
            let lo = transition.mean - transition.spread;
            let hi = transition.mean + transition.spread;
            let travel = rng.random_range(lo..=hi).round().max(1.0) as Frame;
            t += dwell + travel;
            cam = next;
        }
    }

    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by_key(|&i| (detections[i].frame, detections[i].camera_id, detections[i].identity));
    let detections = order.iter().map(|&i| detections[i].clone()).collect();
    let truth = order.iter().map(|&i| truth[i].clone()).collect();

    Ok(Scenario {
        config: cfg.clone(),
        topology: movement,
        truth,
        detections,
    })
}

/// Ground-truth tracklets: detections grouped by camera, identity and
/// `tracklet_len`-frame block. Detections without identity are skipped.
pub fn ground_truth_tracklets(detections: &[Detection], tracklet_len: Frame) -> Result<Vec<Tracklet>> {
    let len = tracklet_len.max(1);
    let mut groups: BTreeMap<(CameraId, IdentityId, Frame), Vec<usize>> = BTreeMap::new();
    for (i, d) in detections.iter().enumerate() {
        if let Some(id) = d.identity {
            groups.entry((d.camera_id, id, d.frame / len)).or_default().push(i);
        }
    }
    let mut out: Vec<Tracklet> = groups
        .into_values()
        .map(|idx| Tracklet::from_detections(detections, idx))
        .collect::<Result<_>>()?;
    out.sort_by_key(|t| (t.start, t.camera_id, t.label));
    Ok(out)
}

/// Mean same-identity distance between ground-truth tracklet features,
/// bucketed by how far apart the two cameras are in the layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalityReport {
    pub intra_camera: f64,
    pub adjacent_camera: f64,
    pub non_adjacent_camera: f64,
}

impl LocalityReport {
    /// Intra-camera < adjacent < non-adjacent.
    pub fn is_ordered(&self) -> bool {
        self.intra_camera < self.adjacent_camera && self.adjacent_camera < self.non_adjacent_camera
    }
}

pub fn measure_locality(tracklets: &[Tracklet], layout: &CameraTopology) -> Result<LocalityReport> {
    let mut sums = [0.0f64; 3];
    let mut counts = [0usize; 3];
    for (i, a) in tracklets.iter().enumerate() {
        for b in &tracklets[i + 1..] {
            if a.label.is_none() || a.label != b.label {
                continue;
            }
            let bucket = if a.camera_id == b.camera_id {
                0
            } else if layout.are_neighbors(a.camera_id, b.camera_id) {
                1
            } else {
                2
            };
            sums[bucket] += featstore::distance(&a.feature, &b.feature)?;
            counts[bucket] += 1;
        }
    }
    let mean = |k: usize| if counts[k] == 0 { f64::NAN } else { sums[k] / counts[k] as f64 };
    Ok(LocalityReport {
        intra_camera: mean(0),
        adjacent_camera: mean(1),
        non_adjacent_camera: mean(2),
    })
}
