use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, ensure, Context};
use mtmct_core::eval;
use mtmct_core::metricnet::MetricNetwork;
use mtmct_core::pipeline::{self, Scorer};
use mtmct_core::sampler::SamplingMode;
use mtmct_core::simgen;

use crate::config::RunConfig;
use crate::experiment::{self, Prepared, SweepParam};
use crate::formats;

pub fn simulate(cfg: &RunConfig, out_dir: &Path, w: &mut dyn Write) -> anyhow::Result<()> {
    let s = simgen::generate(&cfg.sim())?;
    formats::write_scenario(out_dir, &s)?;
    let gt = simgen::ground_truth_tracklets(&s.detections, cfg.tracklet_len)?;
    let loc = simgen::measure_locality(&gt, &s.layout())?;
    writeln!(w, "cameras {}", s.topology.cameras().len())?;
    writeln!(w, "identities {}", s.identity_count())?;
    writeln!(w, "detections {}", s.detections.len())?;
    writeln!(w, "train_detections {}", s.train_detections().len())?;
    writeln!(w, "test_detections {}", s.test_detections().len())?;
    writeln!(
        w,
        "same_identity_distance intra {:.4} adjacent {:.4} non_adjacent {:.4}",
        loc.intra_camera, loc.adjacent_camera, loc.non_adjacent_camera
    )?;
    writeln!(w, "locality_ordered {}", loc.is_ordered())?;
    Ok(())
}

pub fn train_metric(
    cfg: &RunConfig,
    scenario_dir: &Path,
    mode: SamplingMode,
    out: &Path,
    w: &mut dyn Write,
) -> anyhow::Result<()> {
    let stored = formats::read_scenario(scenario_dir)?;
    let s = &stored.scenario;
    let gt = experiment::train_ground_truth(s, cfg.tracklet_len)?;
    let (net, report) = experiment::train_metric(mode, &gt, &s.topology, s.config.feature_dim, &cfg.sampler(), &cfg.train())
        .with_context(|| format!("training the {mode} metric"))?;
    std::fs::write(out, net.to_bytes()).with_context(|| format!("writing {}", out.display()))?;
    writeln!(w, "mode {mode}")?;
    writeln!(w, "epochs {}", report.epoch_losses.len())?;
    writeln!(w, "final_loss {:.6}", report.epoch_losses.last().copied().unwrap_or(f64::NAN))?;
    writeln!(w, "train_accuracy {:.4}", report.train_accuracy)?;
    Ok(())
}

fn load_metric(path: &Path, feature_dim: usize) -> anyhow::Result<Scorer> {
    let bytes = std::fs::read(path).with_context(|| format!("reading metric {}", path.display()))?;
    let net = MetricNetwork::from_bytes(&bytes).with_context(|| format!("decoding metric {}", path.display()))?;
    ensure!(
        net.input_dim() == feature_dim,
        "metric {} expects {}-dim features, scenario has {}",
        path.display(),
        net.input_dim(),
        feature_dim
    );
    Ok(Scorer::Metric(Arc::new(net)))
}

/// `baseline`, `oracle`, a metric name (`intra`, `inter`, `global`) whose
/// file comes from the config, or `name:path`.
pub fn resolve_scorer(spec: &str, cfg: &RunConfig, stats: mtmct_core::featstore::DistanceStats, feature_dim: usize) -> anyhow::Result<Scorer> {
    let (name, path) = match spec.split_once(':') {
        Some((n, p)) => (n, Some(PathBuf::from(p))),
        None => (spec, None),
    };
    match name {
        "baseline" | "oracle" if path.is_some() => bail!("scorer '{name}' takes no file"),
        "baseline" => Ok(Scorer::Baseline(stats)),
        "oracle" => Ok(Scorer::Oracle),
        "intra" | "inter" | "global" => {
            let configured = match name {
                "intra" => &cfg.intra_metric,
                "inter" => &cfg.inter_metric,
                _ => &cfg.global_metric,
            };
            let Some(path) = path.or_else(|| configured.clone()) else {
                bail!("scorer '{name}' needs a metric file: use '{name}:<path>' or set {name}_metric");
            };
            load_metric(&path, feature_dim)
        }
        other => bail!("unknown scorer '{other}' (expected baseline, oracle, intra, inter or global)"),
    }
}

pub fn track(
    cfg: &RunConfig,
    scenario_dir: &Path,
    sct_spec: &str,
    mct_spec: &str,
    out: &Path,
    w: &mut dyn Write,
) -> anyhow::Result<()> {
    let stored = formats::read_scenario(scenario_dir)?;
    let s = &stored.scenario;
    let pcfg = cfg.pipeline();
    let gt = experiment::train_ground_truth(s, pcfg.tracklet_len)?;
    let labeled: Vec<_> = gt.iter().filter_map(|t| t.label.map(|l| (&t.feature, l))).collect();
    let stats = mtmct_core::featstore::compute_stats_all_pairs(&labeled, pcfg.exec)?;
    let sct = resolve_scorer(sct_spec, cfg, stats, s.config.feature_dim).context("SCT scorer")?;
    let mct = resolve_scorer(mct_spec, cfg, stats, s.config.feature_dim).context("MCT scorer")?;
    let (test, offsets) = stored.test_split();
    let result = pipeline::run(&test, &s.topology, &stats, &sct, &mct, &pcfg)?;
    formats::write_result(out, &result, &test, &offsets)?;
    writeln!(w, "tracklets {}", result.tracklets.len())?;
    writeln!(w, "trajectories {}", result.trajectories.len())?;
    writeln!(w, "tracks {}", result.tracks.len())?;
    Ok(())
}

/// Path of the score report written next to a result file.
pub fn scores_path(result: &Path) -> PathBuf {
    let mut name = result.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".scores");
    result.with_file_name(name)
}

pub fn evaluate(scenario_dir: &Path, result_path: &Path, w: &mut dyn Write) -> anyhow::Result<()> {
    let stored = formats::read_scenario(scenario_dir)?;
    let s = &stored.scenario;
    let hyp = formats::read_result(result_path)?;
    let truth = s.test_truth();
    let cameras = formats::truth_cameras(&truth);
    if let Some(h) = hyp.iter().find(|h| !cameras.contains(&h.camera_id)) {
        bail!("result camera {} has no ground truth in the test split", h.camera_id);
    }
    let report = eval::evaluate(&truth, &hyp, s.match_radius())?;
    let text = report.to_key_values();
    formats::write_text(&scores_path(result_path), &text)?;
    w.write_all(text.as_bytes())?;
    Ok(())
}

pub fn compare(
    cfg: &RunConfig,
    scenario_dir: &Path,
    sweep: Option<(SweepParam, Vec<u64>)>,
    out: Option<&Path>,
    w: &mut dyn Write,
) -> anyhow::Result<()> {
    let stored = formats::read_scenario(scenario_dir)?;
    let prep = Prepared::new(stored.scenario, cfg.pipeline())?;
    let seeds: Vec<u64> = (0..cfg.compare_seeds).map(|k| cfg.seed + k).collect();
    let text = match sweep {
        None => experiment::compare_table(&prep, &cfg.sampler(), &cfg.train(), &seeds)?,
        Some((param, grid)) => {
            ensure!(!grid.is_empty() && grid.iter().all(|&g| g > 0), "sweep grid must list positive window lengths");
            experiment::sweep_table(&prep, &cfg.sampler(), &cfg.train(), &seeds, param, &grid)?
        }
    };
    if let Some(path) = out {
        formats::write_text(path, &text)?;
    }
    w.write_all(text.as_bytes())?;
    Ok(())
}
