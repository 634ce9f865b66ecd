//! Flat `key = value` run configuration.
//!
//! Every key is optional; missing keys take the defaults below. Unknown keys
//! are rejected so typos surface as errors instead of silently using defaults.
//!
//! | key | default | meaning |
//! |-----|---------|---------|
//! | `seed` | 0 | scenario, sampling, initialization and shuffling seed |
//! | `cameras` | 4 | number of cameras |
//! | `layout` | `chain` | `chain`, `ring` or `custom` |
//! | `custom_edges` | `[]` | `[[a, b], ...]` camera pairs for `custom` |
//! | `identities` | 20 | simulated targets |
//! | `duration` | 5000 | frames; the last 20% form the test split |
//! | `feature_dim` | 16 | appearance dimension |
//! | `identity_spread` | 1.0 | std of identity embeddings |
//! | `camera_perturb` | 0.6 | per-edge affine appearance change |
//! | `temporal_drift` | 0.3 | drift std per 1000 frames |
//! | `feature_noise` | 0.3 | per-detection feature noise std |
//! | `detection_noise` | 2.0 | center jitter half-width |
//! | `dwell_min`, `dwell_max` | 80, 200 | frames spent per camera visit |
//! | `transition_mean`, `transition_spread` | 200, 180 | travel time between cameras |
//! | `miss_rate` | 0.05 | detection drop probability |
//! | `frame_rate_mode` | `normal` | `normal` or `sparse` |
//! | `sparse_stride` | 25 | observed frame stride in sparse mode |
//! | `open_topology` | false | targets move between any cameras |
//! | `tau_s`, `tau_m` | 600, 2400 | intra / inter sampling windows |
//! | `pairs_requested` | 8000 | training pairs per metric |
//! | `strict_neighbors` | false | inter positives only between neighbors |
//! | `lr_initial` | 1e-4 | learning rate |
//! | `epochs_initial`, `epochs_decay` | 30, 10 | epochs before / after decay |
//! | `lr_decay_factor` | 0.1 | learning rate multiplier after decay |
//! | `batch_size` | 64 | mini-batch size |
//! | `optimizer` | `adam` | `adam` or `sgd` |
//! | `tracklet_len` | 40 | tracklet block length |
//! | `sct_window`, `mct_window` | 150, 6000 | association windows |
//! | `window_stride_fraction` | 0.5 | window advance as a fraction of its length |
//! | `motion_gate` | 10.0 | max center speed inside a tracklet |
//! | `mct_gap_factor` | 3.0 | unscored gap, in expected travel times |
//! | `exact_limit` | 10 | largest window solved exactly |
//! | `exec` | `parallel` | `parallel` or `sequential` |
//! | `sct_scorer`, `mct_scorer` | `baseline` | default scorer specs for `track` |
//! | `intra_metric`, `inter_metric`, `global_metric` | unset | metric files for named scorers |
//! | `compare_seeds` | 5 | training seeds per `compare` cell |

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use mtmct_core::metricnet::{Optimizer, TrainConfig};
use mtmct_core::pipeline::PipelineConfig;
use mtmct_core::sampler::SamplerConfig;
use mtmct_core::simgen::{FrameRateMode, LayoutKind, SimConfig};
use mtmct_core::Exec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,

    pub cameras: u32,
    pub layout: LayoutKind,
    pub custom_edges: Vec<[u32; 2]>,
    pub identities: u32,
    pub duration: u64,
    pub feature_dim: usize,
    pub identity_spread: f64,
    pub camera_perturb: f64,
    pub temporal_drift: f64,
    pub feature_noise: f64,
    pub detection_noise: f64,
    pub dwell_min: u64,
    pub dwell_max: u64,
    pub transition_mean: f64,
    pub transition_spread: f64,
    pub miss_rate: f64,
    pub frame_rate_mode: FrameRateMode,
    pub sparse_stride: u64,
    pub open_topology: bool,

    pub tau_s: u64,
    pub tau_m: u64,
    pub pairs_requested: usize,
    pub strict_neighbors: bool,

    pub lr_initial: f64,
    pub epochs_initial: usize,
    pub lr_decay_factor: f64,
    pub epochs_decay: usize,
    pub batch_size: usize,
    pub optimizer: Optimizer,

    pub tracklet_len: u64,
    pub sct_window: u64,
    pub mct_window: u64,
    pub window_stride_fraction: f64,
    pub motion_gate: f64,
    pub mct_gap_factor: f64,
    pub exact_limit: usize,
    pub exec: Exec,

    pub sct_scorer: String,
    pub mct_scorer: String,
    pub intra_metric: Option<PathBuf>,
    pub inter_metric: Option<PathBuf>,
    pub global_metric: Option<PathBuf>,
    pub compare_seeds: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let sim = SimConfig::default();
        let sampler = SamplerConfig::default();
        let train = TrainConfig::default();
        let pipe = PipelineConfig::default();
        Self {
            seed: 0,
            cameras: sim.cameras,
            layout: sim.layout,
            custom_edges: Vec::new(),
            identities: sim.identities,
            duration: sim.duration,
            feature_dim: sim.feature_dim,
            identity_spread: sim.identity_spread,
            camera_perturb: sim.camera_perturb,
            temporal_drift: sim.temporal_drift,
            feature_noise: sim.feature_noise,
            detection_noise: sim.detection_noise,
            dwell_min: sim.dwell_min,
            dwell_max: sim.dwell_max,
            transition_mean: sim.transition_mean,
            transition_spread: sim.transition_spread,
            miss_rate: sim.miss_rate,
            frame_rate_mode: sim.frame_rate_mode,
            sparse_stride: sim.sparse_stride,
            open_topology: sim.open_topology,
            tau_s: sampler.tau_s,
            tau_m: sampler.tau_m,
            pairs_requested: sampler.pairs_requested,
            strict_neighbors: sampler.strict_neighbors,
            lr_initial: train.lr_initial,
            epochs_initial: train.epochs_initial,
            lr_decay_factor: train.lr_decay_factor,
            epochs_decay: train.epochs_decay,
            batch_size: train.batch_size,
            optimizer: train.optimizer,
            tracklet_len: pipe.tracklet_len,
            sct_window: pipe.sct_window,
            mct_window: pipe.mct_window,
            window_stride_fraction: pipe.window_stride_fraction,
            motion_gate: pipe.motion_gate,
            mct_gap_factor: pipe.mct_gap_factor,
            exact_limit: pipe.exact_limit,
            exec: pipe.exec,
            sct_scorer: "baseline".into(),
            mct_scorer: "baseline".into(),
            intra_metric: None,
            inter_metric: None,
            global_metric: None,
            compare_seeds: 5,
        }
    }
}

impl RunConfig {
    /// Defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                Self::parse(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
        };
        Ok(cfg)
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        self.sim().validate()?;
        self.sampler().validate()?;
        self.train().validate()?;
        self.pipeline().validate()?;
        if self.compare_seeds == 0 {
            bail!("compare_seeds must be at least 1");
        }
        Ok(())
    }

    pub fn sim(&self) -> SimConfig {
        let d = SimConfig::default();
        SimConfig {
            cameras: self.cameras,
            layout: self.layout,
            custom_edges: self.custom_edges.iter().map(|e| (e[0], e[1])).collect(),
            identities: self.identities,
            duration: self.duration,
            feature_dim: self.feature_dim,
            identity_spread: self.identity_spread,
            camera_perturb: self.camera_perturb,
            temporal_drift: self.temporal_drift,
            feature_noise: self.feature_noise,
            detection_noise: self.detection_noise,
            dwell_min: self.dwell_min,
            dwell_max: self.dwell_max,
            transition_mean: self.transition_mean,
            transition_spread: self.transition_spread,
            miss_rate: self.miss_rate,
            frame_rate_mode: self.frame_rate_mode,
            sparse_stride: self.sparse_stride,
            open_topology: self.open_topology,
            seed: self.seed,
            ..d
        }
    }

    pub fn sampler(&self) -> SamplerConfig {
        SamplerConfig {
            tau_s: self.tau_s,
            tau_m: self.tau_m,
            pairs_requested: self.pairs_requested,
            seed: self.seed,
            strict_neighbors: self.strict_neighbors,
        }
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            lr_initial: self.lr_initial,
            epochs_initial: self.epochs_initial,
            lr_decay_factor: self.lr_decay_factor,
            epochs_decay: self.epochs_decay,
            batch_size: self.batch_size,
            optimizer: self.optimizer,
            seed: self.seed,
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            tracklet_len: self.tracklet_len,
            sct_window: self.sct_window,
            mct_window: self.mct_window,
            window_stride_fraction: self.window_stride_fraction,
            motion_gate: self.motion_gate,
            mct_gap_factor: self.mct_gap_factor,
            exact_limit: self.exact_limit,
            exec: self.exec,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn keys_override_defaults() {
        let cfg = RunConfig::parse("seed = 7\nlayout = \"ring\"\ncustom_edges = [[1, 2]]\ntau_m = 800\nexec = \"sequential\"\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.sim().layout, LayoutKind::Ring);
        assert_eq!(cfg.sim().custom_edges, vec![(1, 2)]);
        assert_eq!(cfg.sampler().tau_m, 800);
        assert_eq!(cfg.sampler().seed, 7);
        assert_eq!(cfg.pipeline().exec, Exec::Sequential);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::parse("tau_x = 3").is_err());
        assert!(RunConfig::parse("layout = \"star\"").is_err());
        assert!(RunConfig::parse("miss_rate = 1.5").is_err());
        assert!(RunConfig::parse("tau_s = 0").is_err());
    }

    #[test]
    fn defaults_match_core_defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.sim(), SimConfig::default());
        assert_eq!(cfg.sampler(), SamplerConfig::default());
        assert_eq!(cfg.train(), TrainConfig::default());
        assert_eq!(cfg.pipeline(), PipelineConfig::default());
    }
}
