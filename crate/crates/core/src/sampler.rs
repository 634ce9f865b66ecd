//! Locality-aware construction of labeled training pairs.
//!
//! Pairs are drawn from ground-truth tracklets. Windows are anchored on
//! tracklet start frames:
//!
//! * intra-camera: partner in the same camera with `|Δstart| <= tau_s`;
//! * inter-camera: partner with `|Δstart| <= tau_m`, positives strictly from
//!   another camera, negatives from any camera;
//! * global: partner anywhere in the training set.
//!
//! Every dataset holds exactly as many positives as negatives. Pair types are
//! shuffled, then each pair picks an anchor uniformly among anchors that have
//! at least one eligible partner of that type, then a partner uniformly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metricnet::{PairLabel, PairMeta, PairSample};
use crate::par::{self, Exec};
use crate::topology::CameraTopology;
use crate::types::{Frame, IdentityId, Tracklet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub tau_s: Frame,
    pub tau_m: Frame,
    pub pairs_requested: usize,
    pub seed: u64,
    /// Restrict inter-camera positives to topology neighbors.
    pub strict_neighbors: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            tau_s: 600,
            tau_m: 2400,
            pairs_requested: 8000,
            seed: 0,
            strict_neighbors: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau_s == 0 || self.tau_m == 0 {
            return Err(Error::InvalidConfig("sampling windows must be positive".into()));
        }
        Ok(())
    }
}

/// Which sampling rule produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    Intra,
    Inter,
    Global,
}

impl std::fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SamplingMode::Intra => "intra",
            SamplingMode::Inter => "inter",
            SamplingMode::Global => "global",
        })
    }
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "intra" => Ok(Self::Intra),
            "inter" => Ok(Self::Inter),
            "global" => Ok(Self::Global),
            other => Err(Error::InvalidConfig(format!("unknown sampling mode '{other}'"))),
        }
    }
}

/// Dispatch on `mode`; `topology` is only consulted for inter-camera pairs.
pub fn sample(
    mode: SamplingMode,
    tracklets: &[Tracklet],
    topology: &CameraTopology,
    cfg: &SamplerConfig,
) -> Result<Vec<PairSample>> {
    match mode {
        SamplingMode::Intra => sample_intra(tracklets, cfg),
        SamplingMode::Inter => sample_inter(tracklets, topology, cfg),
        SamplingMode::Global => sample_global(tracklets, cfg),
    }
}

/// Same-camera pairs with start frames at most `tau_s` apart.
pub fn sample_intra(tracklets: &[Tracklet], cfg: &SamplerConfig) -> Result<Vec<PairSample>> {
    cfg.validate()?;
    let labels = labels_of(tracklets)?;
    let order = sorted_by_start(tracklets);
    let cands = candidates(tracklets, &order, cfg.tau_s, |a, b| {
        if tracklets[a].camera_id != tracklets[b].camera_id {
            None
        } else {
            Some(labels[a] == labels[b])
        }
    });
    if cands.iter().all(|c| c.pos.is_empty()) {
        return Err(Error::InsufficientDiversity("positive"));
    }
    if cands.iter().all(|c| c.neg.is_empty()) {
        return Err(Error::InsufficientDiversity("negative"));
    }
    draw(tracklets, &labels, &cands, cfg)
}

/// Cross-camera positives and any-camera negatives with start frames at most
/// `tau_m` apart.
pub fn sample_inter(
    tracklets: &[Tracklet],
    topology: &CameraTopology,
    cfg: &SamplerConfig,
) -> Result<Vec<PairSample>> {
    cfg.validate()?;
    let labels = labels_of(tracklets)?;
    for t in tracklets {
        if !topology.contains(t.camera_id) {
            return Err(Error::UnknownCamera(t.camera_id));
        }
    }
    let order = sorted_by_start(tracklets);
    let cands = candidates(tracklets, &order, cfg.tau_m, |a, b| {
        let (ca, cb) = (tracklets[a].camera_id, tracklets[b].camera_id);
        if labels[a] != labels[b] {
            Some(false)
        } else if ca != cb && (!cfg.strict_neighbors || topology.are_neighbors(ca, cb)) {
            Some(true)
        } else {
            None
        }
    });
    if cands.iter().all(|c| c.pos.is_empty()) {
        return Err(Error::NoCrossCameraPositives);
    }
    if cands.iter().all(|c| c.neg.is_empty()) {
        return Err(Error::InsufficientDiversity("negative"));
    }
    draw(tracklets, &labels, &cands, cfg)
}

/// Pairs drawn from the whole set regardless of camera or time.
pub fn sample_global(tracklets: &[Tracklet], cfg: &SamplerConfig) -> Result<Vec<PairSample>> {
    cfg.validate()?;
    let labels = labels_of(tracklets)?;
    let order = sorted_by_start(tracklets);
    let cands = candidates(tracklets, &order, Frame::MAX, |a, b| Some(labels[a] == labels[b]));
    if cands.iter().all(|c| c.pos.is_empty()) {
        return Err(Error::InsufficientDiversity("positive"));
    }
    if cands.iter().all(|c| c.neg.is_empty()) {
        return Err(Error::InsufficientDiversity("negative"));
    }
    draw(tracklets, &labels, &cands, cfg)
}

fn labels_of(tracklets: &[Tracklet]) -> Result<Vec<IdentityId>> {
    tracklets
        .iter()
        .map(|t| t.label.ok_or(Error::MissingLabel))
        .collect()
}

fn sorted_by_start(tracklets: &[Tracklet]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..tracklets.len()).collect();
    order.sort_by_key(|&i| (tracklets[i].start, i));
    order
}

#[derive(Debug, Default)]
struct Candidates {
    pos: Vec<u32>,
    neg: Vec<u32>,
}

/// Per-anchor partner lists. `classify` returns `Some(true)` for an eligible
/// positive, `Some(false)` for an eligible negative, `None` to skip.
fn candidates<F>(tracklets: &[Tracklet], order: &[usize], tau: Frame, classify: F) -> Vec<Candidates>
where
    F: Fn(usize, usize) -> Option<bool> + Sync + Send,
{
    let starts: Vec<Frame> = order.iter().map(|&i| tracklets[i].start).collect();
    par::map_range(Exec::default(), tracklets.len(), |a| {
        let s = tracklets[a].start;
        let lo = starts.partition_point(|&x| x < s.saturating_sub(tau));
        let hi = starts.partition_point(|&x| x <= s.saturating_add(tau));
        let mut c = Candidates::default();
        let mut partners: Vec<usize> = order[lo..hi].iter().copied().filter(|&b| b != a).collect();
        partners.sort_unstable();
        for b in partners {
            match classify(a, b) {
                Some(true) => c.pos.push(b as u32),
                Some(false) => c.neg.push(b as u32),
                None => {}
            }
        }
        c
    })
}

fn draw(
    tracklets: &[Tracklet],
    labels: &[IdentityId],
    cands: &[Candidates],
    cfg: &SamplerConfig,
) -> Result<Vec<PairSample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = cfg.pairs_requested / 2;
    let mut kinds: Vec<bool> = std::iter::repeat_n(true, half)
        .chain(std::iter::repeat_n(false, half))
        .collect();
    kinds.shuffle(&mut rng);

    let pos_anchors: Vec<usize> = (0..cands.len()).filter(|&a| !cands[a].pos.is_empty()).collect();
    let neg_anchors: Vec<usize> = (0..cands.len()).filter(|&a| !cands[a].neg.is_empty()).collect();

    kinds
        .into_iter()
        .map(|positive| {
            let anchors = if positive { &pos_anchors } else { &neg_anchors };
            let a = anchors[rng.random_range(0..anchors.len())];
            let list = if positive { &cands[a].pos } else { &cands[a].neg };
            let b = list[rng.random_range(0..list.len())] as usize;
            let (ta, tb) = (&tracklets[a], &tracklets[b]);
            let label = if positive { PairLabel::Positive } else { PairLabel::Negative };
            let meta = PairMeta {
                camera_a: ta.camera_id,
                camera_b: tb.camera_id,
                start_a: ta.start,
                start_b: tb.start,
                identity_a: labels[a],
                identity_b: labels[b],
                index_a: a,
                index_b: b,
            };
            PairSample::new(&ta.feature, &tb.feature, label, meta)
        })
        .collect()
}
