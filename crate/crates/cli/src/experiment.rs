//! Variant comparisons and window sweeps over one scenario.

use std::fmt::Write as _;
use std::sync::Arc;

use mtmct_core::eval::{self, ScoreReport, TruthRecord};
use mtmct_core::featstore::{self, DistanceStats};
use mtmct_core::metricnet::{MetricNetwork, TrainConfig, TrainReport};
use mtmct_core::pipeline::{self, PipelineConfig, Scorer, TrackingResult};
use mtmct_core::sampler::{self, SamplerConfig, SamplingMode};
use mtmct_core::simgen::{self, Scenario};
use mtmct_core::{par, CameraTopology, Detection, FeatureVector, Tracklet};

/// Scorer family used at one association level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    Baseline,
    Metric(SamplingMode),
}

/// The eight compared variants as (name, SCT scorer, MCT scorer).
pub const VARIANTS: [(&str, ScorerKind, ScorerKind); 8] = {
    use SamplingMode::*;
    use ScorerKind::*;
    [
        ("baseline", Baseline, Baseline),
        ("global", Metric(Global), Metric(Global)),
        ("intra/global", Metric(Intra), Metric(Global)),
        ("global/inter", Metric(Global), Metric(Inter)),
        ("intra/intra", Metric(Intra), Metric(Intra)),
        ("inter/inter", Metric(Inter), Metric(Inter)),
        ("inter/intra", Metric(Inter), Metric(Intra)),
        ("intra/inter", Metric(Intra), Metric(Inter)),
    ]
};

/// Which sampling window a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    TauS,
    TauM,
}

impl std::str::FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tau_s" => Ok(Self::TauS),
            "tau_m" => Ok(Self::TauM),
            other => Err(format!("unknown sweep parameter '{other}' (expected tau_s or tau_m)")),
        }
    }
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParam::TauS => "tau_s",
            SweepParam::TauM => "tau_m",
        })
    }
}

pub fn train_ground_truth(s: &Scenario, tracklet_len: u64) -> mtmct_core::Result<Vec<Tracklet>> {
    simgen::ground_truth_tracklets(&s.train_detections(), tracklet_len)
}

/// Samples pairs for `mode` and trains a network initialized from `train.seed`.
pub fn train_metric(
    mode: SamplingMode,
    tracklets: &[Tracklet],
    topology: &CameraTopology,
    feature_dim: usize,
    sampler_cfg: &SamplerConfig,
    train: &TrainConfig,
) -> mtmct_core::Result<(MetricNetwork, TrainReport)> {
    let data = sampler::sample(mode, tracklets, topology, sampler_cfg)?;
    let mut net = MetricNetwork::init(feature_dim, train.seed)?;
    let report = net.train(&data, train)?;
    Ok((net, report))
}

/// Everything about a scenario that does not depend on the scorers.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub scenario: Scenario,
    pub train_gt: Vec<Tracklet>,
    pub test: Vec<Detection>,
    pub truth: Vec<TruthRecord>,
    pub stats: DistanceStats,
    pub tracklets: Vec<Tracklet>,
    pub pipeline: PipelineConfig,
}

impl Prepared {
    pub fn new(scenario: Scenario, pipeline: PipelineConfig) -> mtmct_core::Result<Self> {
        let train_gt = train_ground_truth(&scenario, pipeline.tracklet_len)?;
        let labeled: Vec<_> = train_gt.iter().filter_map(|t| t.label.map(|l| (&t.feature, l))).collect();
        let stats = featstore::compute_stats_all_pairs(&labeled, pipeline.exec)?;
        let test = scenario.test_detections();
        let truth = scenario.test_truth();
        let tracklets = pipeline::form_tracklets(&test, &pipeline, &stats)?;
        Ok(Self {
            scenario,
            train_gt,
            test,
            truth,
            stats,
            tracklets,
            pipeline,
        })
    }

    pub fn train_metric(
        &self,
        mode: SamplingMode,
        sampler_cfg: &SamplerConfig,
        train: &TrainConfig,
    ) -> mtmct_core::Result<Scorer> {
        let (net, _) = train_metric(
            mode,
            &self.train_gt,
            &self.scenario.topology,
            self.scenario.config.feature_dim,
            sampler_cfg,
            train,
        )?;
        Ok(Scorer::Metric(Arc::new(net)))
    }

    pub fn track(&self, sct: &Scorer, mct: &Scorer) -> mtmct_core::Result<TrackingResult> {
        pipeline::run_from_tracklets(self.tracklets.clone(), &self.scenario.topology, sct, mct, &self.pipeline)
    }

    pub fn evaluate(&self, sct: &Scorer, mct: &Scorer) -> mtmct_core::Result<ScoreReport> {
        let result = self.track(sct, mct)?;
        eval::evaluate(&self.truth, &result.hypothesis_records(&self.test), self.scenario.match_radius())
    }

    /// Labeled same-camera feature pairs from the test split, drawn with the
    /// intra-camera sampling rule.
    pub fn held_out_intra_pairs(&self, cfg: &SamplerConfig) -> mtmct_core::Result<Vec<(FeatureVector, FeatureVector, bool)>> {
        let gt = simgen::ground_truth_tracklets(&self.test, self.pipeline.tracklet_len)?;
        let samples = sampler::sample_intra(&gt, cfg)?;
        Ok(samples
            .iter()
            .map(|p| {
                let (a, b) = (&gt[p.meta.index_a], &gt[p.meta.index_b]);
                (a.feature.clone(), b.feature.clone(), p.label.is_positive())
            })
            .collect())
    }
}

/// Median of the values; `None` if any cell is missing or there are none.
pub fn median(values: &[Option<f64>]) -> Option<f64> {
    let mut v: Vec<f64> = values.iter().copied().collect::<Option<_>>()?;
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.4}"))
}

struct Trained {
    intra: Option<Scorer>,
    inter: Option<Scorer>,
    global: Option<Scorer>,
}

impl Trained {
    fn get(&self, kind: ScorerKind, baseline: &Scorer) -> Option<Scorer> {
        match kind {
            ScorerKind::Baseline => Some(baseline.clone()),
            ScorerKind::Metric(SamplingMode::Intra) => self.intra.clone(),
            ScorerKind::Metric(SamplingMode::Inter) => self.inter.clone(),
            ScorerKind::Metric(SamplingMode::Global) => self.global.clone(),
        }
    }
}

fn seeded(sampler_cfg: &SamplerConfig, train: &TrainConfig, seed: u64) -> (SamplerConfig, TrainConfig) {
    (
        SamplerConfig { seed, ..sampler_cfg.clone() },
        TrainConfig { seed, ..train.clone() },
    )
}

/// One row per variant: median SCT and MCT IDF1 over `seeds` training seeds.
/// Variants whose metric cannot be trained (for example inter-camera pairs on
/// a single camera) are reported as `n/a`.
pub fn compare_table(
    prep: &Prepared,
    sampler_cfg: &SamplerConfig,
    train: &TrainConfig,
    seeds: &[u64],
) -> mtmct_core::Result<String> {
    let baseline = Scorer::Baseline(prep.stats);
    let per_seed = par::map(prep.pipeline.exec, seeds, |&seed| -> mtmct_core::Result<Vec<Option<ScoreReport>>> {
        let (s, t) = seeded(sampler_cfg, train, seed);
        let trained = Trained {
            intra: prep.train_metric(SamplingMode::Intra, &s, &t).ok(),
            inter: prep.train_metric(SamplingMode::Inter, &s, &t).ok(),
            global: prep.train_metric(SamplingMode::Global, &s, &t).ok(),
        };
        VARIANTS
            .iter()
            .map(|&(_, sct, mct)| match (trained.get(sct, &baseline), trained.get(mct, &baseline)) {
                (Some(a), Some(b)) => prep.evaluate(&a, &b).map(Some),
                _ => Ok(None),
            })
            .collect()
    });
    let per_seed: Vec<Vec<Option<ScoreReport>>> = per_seed.into_iter().collect::<mtmct_core::Result<_>>()?;

    let mut out = String::new();
    writeln!(out, "{:<14} {:>9} {:>9}", "variant", "sct_idf1", "mct_idf1").unwrap();
    for (v, (name, _, _)) in VARIANTS.iter().enumerate() {
        let sct: Vec<Option<f64>> = per_seed.iter().map(|r| r[v].map(|s| s.sct.idf1)).collect();
        let mct: Vec<Option<f64>> = per_seed.iter().map(|r| r[v].map(|s| s.mct.idf1)).collect();
        writeln!(out, "{:<14} {:>9} {:>9}", name, fmt_cell(median(&sct)), fmt_cell(median(&mct))).unwrap();
    }
    Ok(out)
}

/// `(window, IDF1)` rows per level. A `tau_s` sweep retrains the intra
/// metric used for SCT; a `tau_m` sweep retrains the inter metric used for
/// MCT. The other level keeps its metric at the configured window.
pub fn sweep_table(
    prep: &Prepared,
    sampler_cfg: &SamplerConfig,
    train: &TrainConfig,
    seeds: &[u64],
    param: SweepParam,
    grid: &[u64],
) -> mtmct_core::Result<String> {
    let per_seed = par::map(prep.pipeline.exec, seeds, |&seed| -> mtmct_core::Result<Vec<Option<ScoreReport>>> {
        let (s, t) = seeded(sampler_cfg, train, seed);
        let fixed = match param {
            SweepParam::TauS => prep.train_metric(SamplingMode::Inter, &s, &t).ok(),
            SweepParam::TauM => prep.train_metric(SamplingMode::Intra, &s, &t).ok(),
        };
        grid.iter()
            .map(|&w| {
                let swept = match param {
                    SweepParam::TauS => prep.train_metric(SamplingMode::Intra, &SamplerConfig { tau_s: w, ..s.clone() }, &t),
                    SweepParam::TauM => prep.train_metric(SamplingMode::Inter, &SamplerConfig { tau_m: w, ..s.clone() }, &t),
                }
                .ok();
                let (sct, mct) = match param {
                    SweepParam::TauS => (swept, fixed.clone()),
                    SweepParam::TauM => (fixed.clone(), swept),
                };
                match (sct, mct) {
                    (Some(a), Some(b)) => prep.evaluate(&a, &b).map(Some),
                    _ => Ok(None),
                }
            })
            .collect()
    });
    let per_seed: Vec<Vec<Option<ScoreReport>>> = per_seed.into_iter().collect::<mtmct_core::Result<_>>()?;

    let mut out = String::new();
    writeln!(out, "{:<6} {:>8} {:>9}", "level", param, "idf1").unwrap();
    for level in ["sct", "mct"] {
        for (k, w) in grid.iter().enumerate() {
            let vals: Vec<Option<f64>> = per_seed
                .iter()
                .map(|r| r[k].map(|s| if level == "sct" { s.sct.idf1 } else { s.mct.idf1 }))
                .collect();
            writeln!(out, "{:<6} {:>8} {:>9}", level, w, fmt_cell(median(&vals))).unwrap();
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_handles_odd_even_and_missing() {
        assert_eq!(median(&[Some(3.0), Some(1.0), Some(2.0)]), Some(2.0));
        assert_eq!(median(&[Some(4.0), Some(1.0)]), Some(2.5));
        assert_eq!(median(&[Some(1.0), None]), None);
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn variant_names_are_unique_and_end_with_intra_inter() {
        let mut names: Vec<&str> = VARIANTS.iter().map(|v| v.0).collect();
        assert_eq!(names.last(), Some(&"intra/inter"));
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 8);
    }

    #[test]
    fn sweep_param_parses() {
        assert_eq!("tau_m".parse::<SweepParam>().unwrap(), SweepParam::TauM);
        assert!("tau_x".parse::<SweepParam>().is_err());
    }
}
