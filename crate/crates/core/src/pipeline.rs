//! Hierarchical association: detections to tracklets, tracklets to
//! single-camera trajectories, trajectories to cross-camera tracks.
//!
//! The two upper stages share one sliding-window engine. A window of length
//! `W` starting at `s` holds every committed group still active (ended no
//! earlier than `s - W`) plus every uncommitted unit starting in `[s, s + W)`.
//! After clustering, units starting before `s + stride` are committed to
//! their cluster's group; the rest are re-opened in the next window.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cluster::{self, SimilarityGraph, DEFAULT_EXACT_LIMIT};
use crate::error::{Error, Result};
use crate::eval::HypothesisRecord;
use crate::featstore::{self, DistanceStats};
use crate::metricnet::MetricNetwork;
use crate::par::{self, Exec};
use crate::topology::CameraTopology;
use crate::types::{majority_label, CameraId, Detection, FeatureVector, Frame, IdentityId, Track, Tracklet, Trajectory};

/// Pairwise similarity used at one association level.
#[derive(Debug, Clone)]
pub enum Scorer {
    /// Distance-normalized Euclidean score.
    Baseline(DistanceStats),
    /// Learned pair metric.
    Metric(Arc<MetricNetwork>),
    /// +1 for the same ground-truth identity, -1 otherwise.
    Oracle,
    /// The same score for every pair.
    Constant(f64),
}

impl Scorer {
    /// `same` is the ground-truth relation; only the oracle reads it.
    pub fn score(&self, a: &FeatureVector, b: &FeatureVector, same: Option<bool>) -> Result<f64> {
        match self {
            Scorer::Baseline(stats) => featstore::baseline_similarity(a, b, stats),
            Scorer::Metric(net) => net.similarity(a, b),
            Scorer::Oracle => match same {
                Some(true) => Ok(1.0),
                Some(false) => Ok(-1.0),
                None => Err(Error::MissingLabel),
            },
            Scorer::Constant(w) => Ok(*w),
        }
    }

    pub fn score_batch(&self, pairs: &[(&FeatureVector, &FeatureVector, Option<bool>)]) -> Result<Vec<f64>> {
        match self {
            Scorer::Metric(net) => {
                let refs: Vec<(&FeatureVector, &FeatureVector)> = pairs.iter().map(|p| (p.0, p.1)).collect();
                net.similarity_batch(&refs)
            }
            _ => pairs.iter().map(|p| self.score(p.0, p.1, p.2)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub tracklet_len: Frame,
    pub sct_window: Frame,
    pub mct_window: Frame,
    pub window_stride_fraction: f64,
    /// Largest center displacement per frame allowed inside a tracklet.
    pub motion_gate: f64,
    /// Trajectory pairs separated by more than this multiple of the expected
    /// travel time are not scored.
    pub mct_gap_factor: f64,
    pub exact_limit: usize,
    pub exec: Exec,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tracklet_len: 40,
            sct_window: 150,
            mct_window: 6000,
            window_stride_fraction: 0.5,
            motion_gate: 10.0,
            mct_gap_factor: 3.0,
            exact_limit: DEFAULT_EXACT_LIMIT,
            exec: Exec::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.tracklet_len == 0 || self.sct_window == 0 || self.mct_window == 0 {
            return bad("tracklet_len and window lengths must be positive");
        }
        if !(self.window_stride_fraction > 0.0 && self.window_stride_fraction <= 1.0) {
            return bad("window_stride_fraction must lie in (0, 1]");
        }
        if !(self.motion_gate > 0.0) || !(self.mct_gap_factor > 0.0) {
            return bad("motion_gate and mct_gap_factor must be positive");
        }
        Ok(())
    }

    fn stride(&self, window: Frame) -> Frame {
        ((window as f64 * self.window_stride_fraction).round() as Frame).max(1)
    }
}

fn cmp_f64s(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.total_cmp(y);
        if o.is_ne() {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Content order for detections, independent of input position.
fn detection_order(a: &Detection, b: &Detection) -> std::cmp::Ordering {
    (a.camera_id, a.frame)
        .cmp(&(b.camera_id, b.frame))
        .then_with(|| cmp_f64s(&a.center, &b.center))
        .then_with(|| cmp_f64s(a.feature.as_slice(), b.feature.as_slice()))
}

fn tracklet_order(detections: &[Detection], a: &Tracklet, b: &Tracklet) -> std::cmp::Ordering {
    (a.start, a.end, a.camera_id)
        .cmp(&(b.start, b.end, b.camera_id))
        .then_with(|| detection_order(&detections[a.detections[0]], &detections[b.detections[0]]))
}

/// Clusters each camera's detections inside consecutive `tracklet_len`-frame
/// blocks. Same-frame pairs and pairs moving faster than the motion gate are
/// never joined.
pub fn form_tracklets(detections: &[Detection], cfg: &PipelineConfig, stats: &DistanceStats) -> Result<Vec<Tracklet>> {
    form_tracklets_with(detections, cfg, &Scorer::Baseline(*stats))
}

pub fn form_tracklets_with(detections: &[Detection], cfg: &PipelineConfig, scorer: &Scorer) -> Result<Vec<Tracklet>> {
    cfg.validate()?;
    let mut blocks: BTreeMap<(CameraId, Frame), Vec<usize>> = BTreeMap::new();
    for (i, d) in detections.iter().enumerate() {
        blocks.entry((d.camera_id, d.frame / cfg.tracklet_len)).or_default().push(i);
    }
    let blocks: Vec<Vec<usize>> = blocks
        .into_values()
        .map(|mut idx| {
            idx.sort_by(|&a, &b| detection_order(&detections[a], &detections[b]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let per_block = par::map(cfg.exec, &blocks, |idx| cluster_block(detections, idx, cfg, scorer));
    let mut out = Vec::new();
    for r in per_block {
        out.extend(r?);
    }
    out.sort_by(|a, b| tracklet_order(detections, a, b));
    Ok(out)
}

fn cluster_block(detections: &[Detection], idx: &[usize], cfg: &PipelineConfig, scorer: &Scorer) -> Result<Vec<Tracklet>> {
    let n = idx.len();
    let mut g = SimilarityGraph::new(n);
    let mut pairs = Vec::new();
    let mut slots = Vec::new();
    for i in 0..n {
        let a = &detections[idx[i]];
        for j in i + 1..n {
            let b = &detections[idx[j]];
            let df = a.frame.abs_diff(b.frame);
            let dx = a.center[0] - b.center[0];
            let dy = a.center[1] - b.center[1];
            let reach = cfg.motion_gate * df as f64;
            if df == 0 || dx * dx + dy * dy > reach * reach {
                g.forbid(i, j);
                continue;
            }
            let same = match (a.identity, b.identity) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            };
            pairs.push((&a.feature, &b.feature, same));
            slots.push((i, j));
        }
    }
    for (w, (i, j)) in scorer.score_batch(&pairs)?.into_iter().zip(slots) {
        g.set_weight(i, j, w);
    }
    let partition = cluster::solve(&g, cfg.exact_limit);
    partition
        .groups()
        .into_iter()
        .map(|members| Tracklet::from_detections(detections, members.into_iter().map(|k| idx[k]).collect()))
        .collect()
}

#[derive(Debug, Clone, Copy)]
struct Span {
    start: Frame,
    end: Frame,
    camera: CameraId,
}

/// A unit or a growing group in the sliding-window engine.
#[derive(Debug, Clone)]
struct Group {
    spans: Vec<Span>,
    end: Frame,
    feature_sum: Vec<f64>,
    count: usize,
    labels: BTreeMap<IdentityId, usize>,
    members: Vec<usize>,
}

impl Group {
    fn from_tracklets<'a>(member: usize, tracklets: impl IntoIterator<Item = &'a Tracklet>) -> Self {
        let mut g = Group {
            spans: Vec::new(),
            end: 0,
            feature_sum: Vec::new(),
            count: 0,
            labels: BTreeMap::new(),
            members: vec![member],
        };
        for t in tracklets {
            g.spans.push(Span {
                start: t.start,
                end: t.end,
                camera: t.camera_id,
            });
            g.end = g.end.max(t.end);
            if g.feature_sum.is_empty() {
                g.feature_sum = vec![0.0; t.feature.dim()];
            }
            for (s, v) in g.feature_sum.iter_mut().zip(t.feature.as_slice()) {
                *s += v;
            }
            g.count += 1;
            if let Some(l) = t.label {
                *g.labels.entry(l).or_default() += t.detections.len();
            }
        }
        g.spans.sort_by_key(|s| (s.start, s.end, s.camera));
        g
    }

    fn start(&self) -> Frame {
        self.spans[0].start
    }

    fn absorb(&mut self, other: Group) {
        self.spans.extend(other.spans);
        self.spans.sort_by_key(|s| (s.start, s.end, s.camera));
        self.end = self.end.max(other.end);
        for (s, v) in self.feature_sum.iter_mut().zip(&other.feature_sum) {
            *s += v;
        }
        self.count += other.count;
        for (l, c) in other.labels {
            *self.labels.entry(l).or_default() += c;
        }
        self.members.extend(other.members);
    }

    fn mean(&self) -> FeatureVector {
        let n = self.count as f64;
        FeatureVector::new(self.feature_sum.iter().map(|s| s / n).collect()).expect("finite sums")
    }

    fn label(&self) -> Option<IdentityId> {
        majority_label(self.labels.iter().map(|(&l, &c)| (l, c)))
    }

    fn overlaps(&self, other: &Group) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.spans.len() && j < other.spans.len() {
            let (a, b) = (&self.spans[i], &other.spans[j]);
            if a.start <= b.end && b.start <= a.end {
                return true;
            }
            if a.end < b.end {
                i += 1;
            } else {
                j += 1;
            }
        }
        false
    }
}

enum Gate {
    Forbid,
    Neutral,
    Score,
}

struct Engine<'a> {
    window: Frame,
    stride: Frame,
    exact_limit: usize,
    scorer: &'a Scorer,
    gate: &'a dyn Fn(&Group, &Group) -> Gate,
}

impl Engine<'_> {
    /// `units` must be sorted by start frame. Returns groups ordered by their
    /// first start frame.
    fn run(&self, units: Vec<Group>) -> Result<Vec<Group>> {
        let n = units.len();
        let mut pending: Vec<Option<Group>> = units.into_iter().map(Some).collect();
        let mut committed: Vec<Option<Group>> = Vec::new();
        if n == 0 {
            return Ok(Vec::new());
        }
        let start_of = |pending: &[Option<Group>], k: usize| pending[k].as_ref().unwrap().start();
        let mut s = start_of(&pending, 0);
        let mut next = 0;
        while next < n {
            if start_of(&pending, next) >= s + self.window {
                s = start_of(&pending, next);
            }
            let mut hi = next;
            while hi < n && start_of(&pending, hi) < s + self.window {
                hi += 1;
            }
            let last = hi == n;
            let limit = if last { Frame::MAX } else { s + self.stride };
            let horizon = s.saturating_sub(self.window);
            let active: Vec<usize> = (0..committed.len())
                .filter(|&k| committed[k].as_ref().is_some_and(|g| g.end >= horizon))
                .collect();

            let nodes: Vec<&Group> = active
                .iter()
                .map(|&k| committed[k].as_ref().unwrap())
                .chain(pending[next..hi].iter().map(|u| u.as_ref().unwrap()))
                .collect();
            let partition = self.cluster_nodes(&nodes)?;
            let k_commit = (next..hi).take_while(|&k| start_of(&pending, k) < limit).count();

            for members in partition.groups() {
                let groups: Vec<usize> = members.iter().filter(|&&m| m < active.len()).map(|&m| active[m]).collect();
                let new_units: Vec<usize> = members
                    .iter()
                    .filter(|&&m| m >= active.len() && m - active.len() < k_commit)
                    .map(|&m| next + m - active.len())
                    .collect();
                if groups.is_empty() && new_units.is_empty() {
                    continue;
                }
                let target = match groups.first() {
                    Some(&g) => g,
                    None => {
                        committed.push(None);
                        committed.len() - 1
                    }
                };
                let mut acc: Option<Group> = committed[target].take();
                for &g in &groups[groups.len().min(1)..] {
                    let other = committed[g].take().unwrap();
                    acc.as_mut().unwrap().absorb(other);
                }
                for u in new_units {
                    let unit = pending[u].take().unwrap();
                    match acc.as_mut() {
                        Some(a) => a.absorb(unit),
                        None => acc = Some(unit),
                    }
                }
                committed[target] = acc;
            }
            next += k_commit;
            s += self.stride;
        }
        let mut out: Vec<Group> = committed.into_iter().flatten().collect();
        out.sort_by_key(|g| (g.start(), g.members.iter().copied().min()));
        Ok(out)
    }

    fn cluster_nodes(&self, nodes: &[&Group]) -> Result<cluster::Partition> {
        let n = nodes.len();
        let means: Vec<FeatureVector> = nodes.iter().map(|g| g.mean()).collect();
        let labels: Vec<Option<IdentityId>> = nodes.iter().map(|g| g.label()).collect();
        let mut g = SimilarityGraph::new(n);
        let mut pairs = Vec::new();
        let mut slots = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                match (self.gate)(nodes[i], nodes[j]) {
                    Gate::Forbid => g.forbid(i, j),
                    Gate::Neutral => {}
                    Gate::Score => {
                        let same = match (labels[i], labels[j]) {
                            (Some(a), Some(b)) => Some(a == b),
                            _ => None,
                        };
                        pairs.push((&means[i], &means[j], same));
                        slots.push((i, j));
                    }
                }
            }
        }
        for (w, (i, j)) in self.scorer.score_batch(&pairs)?.into_iter().zip(slots) {
            g.set_weight(i, j, w);
        }
        Ok(cluster::solve(&g, self.exact_limit))
    }
}

/// Links one camera's tracklets into trajectories.
pub fn single_camera_tracking(tracklets: &[Tracklet], scorer: &Scorer, cfg: &PipelineConfig) -> Result<Vec<Trajectory>> {
    cfg.validate()?;
    if let Some(first) = tracklets.first() {
        if let Some(t) = tracklets.iter().find(|t| t.camera_id != first.camera_id) {
            return Err(Error::MixedCameras(first.camera_id, t.camera_id));
        }
    }
    let mut order: Vec<usize> = (0..tracklets.len()).collect();
    order.sort_by_key(|&i| (tracklets[i].start, tracklets[i].end, i));
    let units = order
        .iter()
        .map(|&i| Group::from_tracklets(i, std::iter::once(&tracklets[i])))
        .collect();
    let gate = |a: &Group, b: &Group| if a.overlaps(b) { Gate::Forbid } else { Gate::Score };
    let engine = Engine {
        window: cfg.sct_window,
        stride: cfg.stride(cfg.sct_window),
        exact_limit: cfg.exact_limit,
        scorer,
        gate: &gate,
    };
    engine
        .run(units)?
        .into_iter()
        .map(|g| Trajectory::new(g.members.iter().map(|&i| tracklets[i].clone()).collect()))
        .collect()
}

/// Expected travel time between cameras, used by the MCT gap gate. A return
/// to the same camera needs at least one round trip over its shortest edge.
fn reference_times(topology: &CameraTopology) -> HashMap<(CameraId, CameraId), f64> {
    let mut out = HashMap::new();
    for &a in topology.cameras() {
        for &b in topology.cameras() {
            let t = if a == b {
                topology
                    .edges()
                    .iter()
                    .filter(|e| e.a == a || e.b == a)
                    .map(|e| e.transition.mean)
                    .min_by(f64::total_cmp)
                    .map(|m| 2.0 * m)
            } else {
                topology.travel_time(a, b)
            };
            if let Some(t) = t {
                out.insert((a, b), t);
            }
        }
    }
    out
}

/// Links trajectories from all cameras into tracks.
pub fn multi_camera_tracking(
    trajectories: &[Trajectory],
    scorer: &Scorer,
    topology: &CameraTopology,
    cfg: &PipelineConfig,
) -> Result<Vec<Track>> {
    cfg.validate()?;
    for t in trajectories {
        if !topology.contains(t.camera_id) {
            return Err(Error::UnknownCamera(t.camera_id));
        }
    }
    let mut order: Vec<usize> = (0..trajectories.len()).collect();
    order.sort_by_key(|&i| (trajectories[i].start, trajectories[i].end, trajectories[i].camera_id, i));
    let units = order
        .iter()
        .map(|&i| Group::from_tracklets(i, &trajectories[i].tracklets))
        .collect();
    let refs = reference_times(topology);
    let factor = cfg.mct_gap_factor;
    let gate = |a: &Group, b: &Group| {
        if a.overlaps(b) {
            return Gate::Forbid;
        }
        let mut timeline: Vec<(Span, bool)> = a
            .spans
            .iter()
            .map(|&s| (s, false))
            .chain(b.spans.iter().map(|&s| (s, true)))
            .collect();
        timeline.sort_by_key(|(s, _)| s.start);
        for w in timeline.windows(2) {
            let ((p, po), (q, qo)) = (w[0], w[1]);
            if po == qo {
                continue;
            }
            if let Some(r) = refs.get(&(p.camera, q.camera)) {
                if (q.start - p.end) as f64 > factor * r {
                    return Gate::Neutral;
                }
            }
        }
        Gate::Score
    };
    let engine = Engine {
        window: cfg.mct_window,
        stride: cfg.stride(cfg.mct_window),
        exact_limit: cfg.exact_limit,
        scorer,
        gate: &gate,
    };
    Ok(engine
        .run(units)?
        .into_iter()
        .enumerate()
        .map(|(k, g)| {
            let mut trajs: Vec<Trajectory> = g.members.iter().map(|&i| trajectories[i].clone()).collect();
            trajs.sort_by_key(|t| (t.start, t.camera_id));
            Track {
                global_id: k as u64 + 1,
                trajectories: trajs,
            }
        })
        .collect())
}

/// All three stages plus their intermediate outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingResult {
    pub tracklets: Vec<Tracklet>,
    pub trajectories: Vec<Trajectory>,
    pub tracks: Vec<Track>,
}

impl TrackingResult {
    /// One record per tracked detection, carrying its track id, in input
    /// order.
    pub fn hypothesis_records(&self, detections: &[Detection]) -> Vec<HypothesisRecord> {
        let mut ids = vec![None; detections.len()];
        for track in &self.tracks {
            for i in track.detection_indices() {
                ids[i] = Some(track.global_id);
            }
        }
        detections
            .iter()
            .zip(ids)
            .filter_map(|(d, id)| {
                id.map(|hypothesis| HypothesisRecord {
                    camera_id: d.camera_id,
                    frame: d.frame,
                    hypothesis,
                    center: d.center,
                })
            })
            .collect()
    }
}

pub fn run(
    detections: &[Detection],
    topology: &CameraTopology,
    stats: &DistanceStats,
    sct: &Scorer,
    mct: &Scorer,
    cfg: &PipelineConfig,
) -> Result<TrackingResult> {
    let tracklets = form_tracklets(detections, cfg, stats)?;
    run_from_tracklets(tracklets, topology, sct, mct, cfg)
}

/// Runs SCT and MCT on precomputed tracklets.
pub fn run_from_tracklets(
    tracklets: Vec<Tracklet>,
    topology: &CameraTopology,
    sct: &Scorer,
    mct: &Scorer,
    cfg: &PipelineConfig,
) -> Result<TrackingResult> {
    cfg.validate()?;
    let mut per_camera: BTreeMap<CameraId, Vec<Tracklet>> = BTreeMap::new();
    for t in &tracklets {
        per_camera.entry(t.camera_id).or_default().push(t.clone());
    }
    let cameras: Vec<Vec<Tracklet>> = per_camera.into_values().collect();
    let mut trajectories = Vec::new();
    for r in par::map(cfg.exec, &cameras, |ts| single_camera_tracking(ts, sct, cfg)) {
        trajectories.extend(r?);
    }
    trajectories.sort_by_key(|t| (t.start, t.camera_id, t.end));
    let tracks = multi_camera_tracking(&trajectories, mct, topology, cfg)?;
    Ok(TrackingResult {
        tracklets,
        trajectories,
        tracks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Transition;

    fn det(camera_id: CameraId, frame: Frame, x: f64, identity: IdentityId, f: f64) -> Detection {
        Detection {
            camera_id,
            frame,
            center: [x, 100.0],
            identity: Some(identity),
            feature: FeatureVector::new(vec![f, 0.0]).unwrap(),
        }
    }

    fn stats() -> DistanceStats {
        DistanceStats::new(0.1, 2.0).unwrap()
    }

    fn cfg() -> PipelineConfig {
        PipelineConfig {
            exec: Exec::Sequential,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn one_clean_target_gives_one_tracklet_per_block() {
        let dets: Vec<Detection> = (0..120).map(|f| det(1, f, f as f64, 1, 0.0)).collect();
        let t = form_tracklets(&dets, &cfg(), &stats()).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.iter().all(|t| t.len_frames() == 40));
        assert!(form_tracklets(&[], &cfg(), &stats()).unwrap().is_empty());
    }

    #[test]
    fn two_separated_targets_give_pure_tracklets() {
        let mut dets = Vec::new();
        for f in 0..80 {
            dets.push(det(1, f, 10.0 + f as f64, 1, 0.0));
            dets.push(det(1, f, 30.0 + f as f64, 2, 5.0));
        }
        let t = form_tracklets(&dets, &cfg(), &stats()).unwrap();
        assert_eq!(t.len(), 4);
        for tr in &t {
            assert_eq!(tr.detections.len(), 40);
            assert!(tr.detections.iter().all(|&i| dets[i].identity == tr.label));
        }
    }

    fn tracklet(camera: CameraId, start: Frame, end: Frame, label: IdentityId, f: f64) -> Tracklet {
        Tracklet {
            camera_id: camera,
            start,
            end,
            detections: vec![0],
            feature: FeatureVector::new(vec![f]).unwrap(),
            label: Some(label),
        }
    }

    #[test]
    fn overlapping_tracklets_are_never_merged() {
        let ts = vec![tracklet(1, 0, 39, 1, 0.0), tracklet(1, 20, 59, 1, 0.0)];
        let out = single_camera_tracking(&ts, &Scorer::Constant(1.0), &cfg()).unwrap();
        assert_eq!(out.len(), 2);
        let one = single_camera_tracking(&ts[..1], &Scorer::Oracle, &cfg()).unwrap();
        assert_eq!(one.len(), 1);
        let mixed = vec![tracklet(1, 0, 39, 1, 0.0), tracklet(2, 40, 79, 1, 0.0)];
        assert!(single_camera_tracking(&mixed, &Scorer::Oracle, &cfg()).is_err());
    }

    #[test]
    fn oracle_sct_recovers_identities_across_windows() {
        // Two identities, interleaved, over 600 frames (several windows).
        let mut ts = Vec::new();
        for b in 0..15u64 {
            ts.push(tracklet(1, b * 40, b * 40 + 39, 1, 0.0));
            if b % 3 != 1 {
                ts.push(tracklet(1, b * 40 + 1, b * 40 + 38, 2, 0.0));
            }
        }
        let out = single_camera_tracking(&ts, &Scorer::Oracle, &cfg()).unwrap();
        assert_eq!(out.len(), 2);
        for t in &out {
            let l = t.label();
            assert!(t.tracklets.iter().all(|x| x.label == l));
        }
    }

    #[test]
    fn returning_target_forms_one_track() {
        let topo = CameraTopology::chain(2, Transition { mean: 50.0, spread: 10.0 });
        let traj = |c, s, e| Trajectory::new(vec![tracklet(c, s, e, 7, 0.0)]).unwrap();
        let trajs = vec![traj(1, 0, 99), traj(2, 150, 249), traj(1, 300, 399)];
        let tracks = multi_camera_tracking(&trajs, &Scorer::Oracle, &topo, &cfg()).unwrap();
        assert_eq!(tracks.len(), 1);
        let cams: Vec<CameraId> = tracks[0].trajectories.iter().map(|t| t.camera_id).collect();
        assert_eq!(cams, vec![1, 2, 1]);
    }

    #[test]
    fn overlapping_trajectories_are_separate_tracks() {
        let topo = CameraTopology::chain(2, Transition { mean: 50.0, spread: 10.0 });
        let trajs = vec![
            Trajectory::new(vec![tracklet(1, 0, 99, 1, 0.0)]).unwrap(),
            Trajectory::new(vec![tracklet(2, 50, 149, 1, 0.0)]).unwrap(),
        ];
        let tracks = multi_camera_tracking(&trajs, &Scorer::Constant(1.0), &topo, &cfg()).unwrap();
        assert_eq!(tracks.len(), 2);
    }

    #[test]
    fn empty_input_gives_empty_result() {
        let topo = CameraTopology::chain(2, Transition { mean: 50.0, spread: 10.0 });
        let r = run(&[], &topo, &stats(), &Scorer::Oracle, &Scorer::Oracle, &cfg()).unwrap();
        assert!(r.tracklets.is_empty() && r.trajectories.is_empty() && r.tracks.is_empty());
    }
}
