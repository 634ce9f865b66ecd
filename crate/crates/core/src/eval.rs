//! Identity-based tracking measures and pairwise error rates.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use pathfinding::kuhn_munkres::kuhn_munkres;
use pathfinding::matrix::Matrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::Scorer;
use crate::types::{CameraId, FeatureVector, Frame, IdentityId};

/// One ground-truth observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub camera_id: CameraId,
    pub frame: Frame,
    pub identity: IdentityId,
    pub center: [f64; 2],
}

/// One hypothesized observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisRecord {
    pub camera_id: CameraId,
    pub frame: Frame,
    pub hypothesis: u64,
    pub center: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdScores {
    pub idtp: u64,
    pub idfp: u64,
    pub idfn: u64,
    pub idf1: f64,
    pub idp: f64,
    pub idr: f64,
}

impl IdScores {
    /// Ratios from raw counts. 0/0 conventions: with nothing to find and
    /// nothing reported everything is 1; otherwise an undefined ratio is 0.
    pub fn from_counts(idtp: u64, idfp: u64, idfn: u64) -> Self {
        let ratio = |num: u64, den: u64, other: u64| {
            if den > 0 {
                num as f64 / den as f64
            } else if other == 0 {
                1.0
            } else {
                0.0
            }
        };
        let denom = 2 * idtp + idfp + idfn;
        Self {
            idtp,
            idfp,
            idfn,
            idf1: if denom == 0 { 1.0 } else { 2.0 * idtp as f64 / denom as f64 },
            idp: ratio(idtp, idtp + idfp, idfn),
            idr: ratio(idtp, idtp + idfn, idfp),
        }
    }
}

/// Per-pair frame overlap between true and hypothesized identities.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    pub truth_ids: Vec<IdentityId>,
    pub hypothesis_ids: Vec<u64>,
    /// `overlap[t][h]` frames in which truth `t` and hypothesis `h` match.
    pub overlap: Vec<Vec<u64>>,
    pub truth_total: u64,
    pub hypothesis_total: u64,
}

fn check_cameras(truth: &[TruthRecord], hyp: &[HypothesisRecord]) -> Result<()> {
    if truth.is_empty() {
        return Ok(());
    }
    let cams: BTreeSet<CameraId> = truth.iter().map(|t| t.camera_id).collect();
    match hyp.iter().find(|h| !cams.contains(&h.camera_id)) {
        Some(h) => Err(Error::InconsistentCameras(h.camera_id)),
        None => Ok(()),
    }
}

pub fn overlap_table(truth: &[TruthRecord], hyp: &[HypothesisRecord], radius: f64) -> Result<OverlapTable> {
    check_cameras(truth, hyp)?;
    let truth_ids: Vec<IdentityId> = truth
        .iter()
        .map(|t| t.identity)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let hypothesis_ids: Vec<u64> = hyp
        .iter()
        .map(|h| h.hypothesis)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let t_index: HashMap<IdentityId, usize> = truth_ids.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let h_index: HashMap<u64, usize> = hypothesis_ids.iter().enumerate().map(|(i, &h)| (h, i)).collect();

    let mut by_frame: HashMap<(CameraId, Frame), Vec<&TruthRecord>> = HashMap::new();
    for t in truth {
        by_frame.entry((t.camera_id, t.frame)).or_default().push(t);
    }
    let mut overlap = vec![vec![0u64; hypothesis_ids.len()]; truth_ids.len()];
    let r2 = radius * radius;
    for h in hyp {
        if let Some(candidates) = by_frame.get(&(h.camera_id, h.frame)) {
            for t in candidates {
                let dx = t.center[0] - h.center[0];
                let dy = t.center[1] - h.center[1];
                if dx * dx + dy * dy <= r2 {
                    overlap[t_index[&t.identity]][h_index[&h.hypothesis]] += 1;
                }
            }
        }
    }
    Ok(OverlapTable {
        truth_ids,
        hypothesis_ids,
        overlap,
        truth_total: truth.len() as u64,
        hypothesis_total: hyp.len() as u64,
    })
}

/// Maximum total overlap of a one-to-one truth/hypothesis matching.
pub fn max_overlap(table: &OverlapTable) -> u64 {
    let n = table.truth_ids.len().max(table.hypothesis_ids.len());
    if n == 0 {
        return 0;
    }
    // Square matrix; padding rows/columns act as dummy nodes.
    let mut w = Matrix::new(n, n, 0i64);
    for (t, row) in table.overlap.iter().enumerate() {
        for (h, &v) in row.iter().enumerate() {
            w[(t, h)] = v as i64;
        }
    }
    let (total, _) = kuhn_munkres(&w);
    total as u64
}

/// IDF1, IDP and IDR over all cameras jointly.
pub fn id_measures(truth: &[TruthRecord], hyp: &[HypothesisRecord], radius: f64) -> Result<IdScores> {
    let table = overlap_table(truth, hyp, radius)?;
    let idtp = max_overlap(&table);
    Ok(IdScores::from_counts(
        idtp,
        table.hypothesis_total - idtp,
        table.truth_total - idtp,
    ))
}

/// Single-camera measures: each camera is matched on its own and the counts
/// are pooled.
pub fn sct_id_measures(truth: &[TruthRecord], hyp: &[HypothesisRecord], radius: f64) -> Result<IdScores> {
    check_cameras(truth, hyp)?;
    let mut per_cam: BTreeMap<CameraId, (Vec<TruthRecord>, Vec<HypothesisRecord>)> = BTreeMap::new();
    for t in truth {
        per_cam.entry(t.camera_id).or_default().0.push(t.clone());
    }
    for h in hyp {
        per_cam.entry(h.camera_id).or_default().1.push(h.clone());
    }
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (t, h) in per_cam.values() {
        let s = id_measures(t, h, radius)?;
        tp += s.idtp;
        fp += s.idfp;
        fn_ += s.idfn;
    }
    Ok(IdScores::from_counts(tp, fp, fn_))
}

/// SCT and MCT scores for one result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreReport {
    pub sct: IdScores,
    pub mct: IdScores,
}

pub fn evaluate(truth: &[TruthRecord], hyp: &[HypothesisRecord], radius: f64) -> Result<ScoreReport> {
    Ok(ScoreReport {
        sct: sct_id_measures(truth, hyp, radius)?,
        mct: id_measures(truth, hyp, radius)?,
    })
}

impl ScoreReport {
    /// `key = value` lines, one per measure.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (level, s) in [("sct", &self.sct), ("mct", &self.mct)] {
            out.push_str(&format!("{level}.idf1 = {:.6}\n", s.idf1));
            out.push_str(&format!("{level}.idp = {:.6}\n", s.idp));
            out.push_str(&format!("{level}.idr = {:.6}\n", s.idr));
            out.push_str(&format!("{level}.idtp = {}\n", s.idtp));
            out.push_str(&format!("{level}.idfp = {}\n", s.idfp));
            out.push_str(&format!("{level}.idfn = {}\n", s.idfn));
        }
        out
    }

    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("expected key = value, got {line:?}")))?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        let count = |key: String| -> Result<u64> {
            map.get(&key)
                .ok_or_else(|| Error::Malformed(format!("missing key {key}")))?
                .parse()
                .map_err(|_| Error::Malformed(format!("bad value for {key}")))
        };
        let level = |name: &str| -> Result<IdScores> {
            Ok(IdScores::from_counts(
                count(format!("{name}.idtp"))?,
                count(format!("{name}.idfp"))?,
                count(format!("{name}.idfn"))?,
            ))
        };
        Ok(Self {
            sct: level("sct")?,
            mct: level("mct")?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairErrorRates {
    pub fpr: f64,
    pub fnr: f64,
}

/// Error rates of the decision rule `w > 0` on labeled feature pairs.
pub fn pair_error_rates(scorer: &Scorer, pairs: &[(FeatureVector, FeatureVector, bool)]) -> Result<PairErrorRates> {
    let positives = pairs.iter().filter(|p| p.2).count();
    let negatives = pairs.len() - positives;
    if positives == 0 {
        return Err(Error::MissingClass("positive"));
    }
    if negatives == 0 {
        return Err(Error::MissingClass("negative"));
    }
    let refs: Vec<(&FeatureVector, &FeatureVector, Option<bool>)> =
        pairs.iter().map(|(a, b, s)| (a, b, Some(*s))).collect();
    let scores = scorer.score_batch(&refs)?;
    let (mut fp, mut fn_) = (0usize, 0usize);
    for (w, p) in scores.iter().zip(pairs) {
        match (p.2, *w > 0.0) {
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            _ => {}
        }
    }
    Ok(PairErrorRates {
        fpr: fp as f64 / negatives as f64,
        fnr: fn_ as f64 / positives as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth_line(id: IdentityId, frames: std::ops::Range<Frame>) -> Vec<TruthRecord> {
        frames
            .map(|f| TruthRecord {
                camera_id: 1,
                frame: f,
                identity: id,
                center: [f as f64, 0.0],
            })
            .collect()
    }

    fn hyp_of(truth: &[TruthRecord], id: impl Fn(&TruthRecord) -> u64) -> Vec<HypothesisRecord> {
        truth
            .iter()
            .map(|t| HypothesisRecord {
                camera_id: t.camera_id,
                frame: t.frame,
                hypothesis: id(t),
                center: t.center,
            })
            .collect()
    }

    #[test]
    fn identical_hypothesis_is_perfect() {
        let mut truth = truth_line(1, 0..50);
        truth.extend(truth_line(2, 0..30));
        let s = id_measures(&truth, &hyp_of(&truth, |t| t.identity as u64 + 10), 1.0).unwrap();
        assert_eq!((s.idf1, s.idp, s.idr), (1.0, 1.0, 1.0));
    }

    #[test]
    fn split_identity_halves_score() {
        let truth = truth_line(1, 0..100);
        let hyp = hyp_of(&truth, |t| if t.frame < 50 { 1 } else { 2 });
        let s = id_measures(&truth, &hyp, 1.0).unwrap();
        assert_eq!((s.idtp, s.idfp, s.idfn), (50, 50, 50));
        assert_eq!(s.idf1, 0.5);
    }

    #[test]
    fn empty_conventions() {
        let s = id_measures(&[], &[], 1.0).unwrap();
        assert_eq!((s.idf1, s.idp, s.idr), (1.0, 1.0, 1.0));
        let truth = truth_line(1, 0..10);
        let s = id_measures(&truth, &[], 1.0).unwrap();
        assert_eq!((s.idf1, s.idp, s.idr), (0.0, 0.0, 0.0));
    }

    #[test]
    fn unknown_camera_in_hypothesis_is_an_error() {
        let truth = truth_line(1, 0..10);
        let mut hyp = hyp_of(&truth, |_| 1);
        hyp[0].camera_id = 7;
        assert_eq!(id_measures(&truth, &hyp, 1.0), Err(Error::InconsistentCameras(7)));
    }

    #[test]
    fn far_centers_do_not_match() {
        let truth = truth_line(1, 0..10);
        let mut hyp = hyp_of(&truth, |_| 1);
        for h in &mut hyp {
            h.center[1] += 5.0;
        }
        assert_eq!(id_measures(&truth, &hyp, 1.0).unwrap().idtp, 0);
        assert_eq!(id_measures(&truth, &hyp, 5.0).unwrap().idtp, 10);
    }

    #[test]
    fn sct_pools_cameras_separately() {
        // One identity seen in two cameras, one hypothesis id per camera:
        // perfect per camera, half credit globally.
        let mut truth = truth_line(1, 0..10);
        let mut other = truth_line(1, 20..30);
        for t in &mut other {
            t.camera_id = 2;
        }
        truth.extend(other);
        let hyp = hyp_of(&truth, |t| t.camera_id as u64);
        let r = evaluate(&truth, &hyp, 1.0).unwrap();
        assert_eq!(r.sct.idf1, 1.0);
        assert_eq!(r.mct.idf1, 0.5);
    }

    #[test]
    fn report_round_trips() {
        let r = ScoreReport {
            sct: IdScores::from_counts(5, 1, 2),
            mct: IdScores::from_counts(3, 3, 4),
        };
        assert_eq!(ScoreReport::from_key_values(&r.to_key_values()).unwrap(), r);
        assert!(ScoreReport::from_key_values("sct.idtp = x").is_err());
    }

    #[test]
    fn oracle_and_constant_error_rates() {
        let a = FeatureVector::new(vec![0.0]).unwrap();
        let b = FeatureVector::new(vec![1.0]).unwrap();
        let pairs = vec![(a.clone(), a.clone(), true), (a.clone(), b.clone(), false), (b.clone(), a, false)];
        let r = pair_error_rates(&Scorer::Oracle, &pairs).unwrap();
        assert_eq!((r.fpr, r.fnr), (0.0, 0.0));
        let r = pair_error_rates(&Scorer::Constant(1.0), &pairs).unwrap();
        assert_eq!((r.fpr, r.fnr), (1.0, 0.0));
        assert!(pair_error_rates(&Scorer::Oracle, &pairs[..1]).is_err());
    }
}
