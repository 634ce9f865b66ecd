//! On-disk scenario, feature and result files.
//!
//! A scenario directory holds:
//!
//! * `scenario.meta`: TOML with the generating simulator settings;
//! * `detections.txt`: CSV rows `camera,frame,identity,x,y,feature_offset`,
//!   identity blank when unknown;
//! * `features.bin`: the feature container, row `feature_offset` per detection;
//! * `truth.txt`: CSV rows `camera,frame,identity,x,y` with true centers.
//!
//! Result files reuse the detection layout with hypothesis ids in the
//! identity column; `feature_offset` points into the scenario's container.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context};
use mtmct_core::eval::{HypothesisRecord, TruthRecord};
use mtmct_core::pipeline::TrackingResult;
use mtmct_core::simgen::{Scenario, SimConfig};
use mtmct_core::{Detection, FeatureVector, Frame};
use serde::{Deserialize, Serialize};

pub const META_FILE: &str = "scenario.meta";
pub const DETECTIONS_FILE: &str = "detections.txt";
pub const FEATURES_FILE: &str = "features.bin";
pub const TRUTH_FILE: &str = "truth.txt";

const FEATURE_MAGIC: &[u8; 4] = b"MTFV";
const FEATURE_VERSION: u32 = 1;
const META_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioMeta {
    format_version: u32,
    identities: usize,
    detections: usize,
    split_frame: Frame,
    sim: SimConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct DetectionRow {
    camera: u32,
    frame: u64,
    identity: Option<u64>,
    x: f64,
    y: f64,
    feature_offset: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TruthRow {
    camera: u32,
    frame: u64,
    identity: u32,
    x: f64,
    y: f64,
}

/// Row-major feature matrix with a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub dim: usize,
    pub values: Vec<f64>,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.values.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> Option<&[f64]> {
        self.values.get(i * self.dim..(i + 1) * self.dim)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(20 + 8 * self.values.len());
        out.extend_from_slice(FEATURE_MAGIC);
        out.extend_from_slice(&FEATURE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&(self.len() as u64).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> anyhow::Result<Self> {
        ensure!(bytes.len() >= 20, "feature file truncated");
        ensure!(&bytes[..4] == FEATURE_MAGIC, "bad feature file magic");
        let version = u32::from_le_bytes(bytes[4..8].try_into()?);
        ensure!(version == FEATURE_VERSION, "unsupported feature file version {version}");
        let dim = u32::from_le_bytes(bytes[8..12].try_into()?) as usize;
        let count = u64::from_le_bytes(bytes[12..20].try_into()?) as usize;
        let body = &bytes[20..];
        ensure!(
            dim > 0 && body.len() == dim * count * 8,
            "feature file holds {} bytes, header promises {count} rows of dimension {dim}",
            body.len()
        );
        let values = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self { dim, values })
    }
}

/// A scenario read back from disk. `offsets[i]` is the feature row of
/// `scenario.detections[i]`.
#[derive(Debug, Clone)]
pub struct StoredScenario {
    pub scenario: Scenario,
    pub offsets: Vec<u64>,
}

impl StoredScenario {
    /// Test-split detections with their feature offsets.
    pub fn test_split(&self) -> (Vec<Detection>, Vec<u64>) {
        let split = self.scenario.split_frame();
        self.scenario
            .detections
            .iter()
            .zip(&self.offsets)
            .filter(|(d, _)| d.frame >= split)
            .map(|(d, &o)| (d.clone(), o))
            .unzip()
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn write_scenario(dir: &Path, s: &Scenario) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let meta = ScenarioMeta {
        format_version: META_VERSION,
        identities: s.identity_count(),
        detections: s.detections.len(),
        split_frame: s.split_frame(),
        sim: s.config.clone(),
    };
    std::fs::write(dir.join(META_FILE), toml::to_string(&meta)?)?;

    let mut w = csv::Writer::from_writer(create(&dir.join(DETECTIONS_FILE))?);
    let mut features = FeatureTable {
        dim: s.config.feature_dim,
        values: Vec::with_capacity(s.detections.len() * s.config.feature_dim),
    };
    for (i, d) in s.detections.iter().enumerate() {
        w.serialize(DetectionRow {
            camera: d.camera_id,
            frame: d.frame,
            identity: d.identity.map(u64::from),
            x: d.center[0],
            y: d.center[1],
            feature_offset: i as u64,
        })?;
        features.values.extend_from_slice(d.feature.as_slice());
    }
    w.flush()?;
    std::fs::write(dir.join(FEATURES_FILE), features.to_bytes())?;

    let mut w = csv::Writer::from_writer(create(&dir.join(TRUTH_FILE))?);
    for t in &s.truth {
        w.serialize(TruthRow {
            camera: t.camera_id,
            frame: t.frame,
            identity: t.identity,
            x: t.center[0],
            y: t.center[1],
        })?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let mut rows = Vec::new();
    for (line, row) in r.deserialize().enumerate() {
        rows.push(row.with_context(|| format!("{}: record {}", path.display(), line + 1))?);
    }
    Ok(rows)
}

pub fn read_scenario(dir: &Path) -> anyhow::Result<StoredScenario> {
    let meta_path = dir.join(META_FILE);
    let text = std::fs::read_to_string(&meta_path).with_context(|| format!("reading {}", meta_path.display()))?;
    let meta: ScenarioMeta = toml::from_str(&text).with_context(|| format!("parsing {}", meta_path.display()))?;
    ensure!(meta.format_version == META_VERSION, "unsupported scenario version {}", meta.format_version);
    meta.sim.validate()?;

    let mut bytes = Vec::new();
    let feat_path = dir.join(FEATURES_FILE);
    File::open(&feat_path)
        .with_context(|| format!("opening {}", feat_path.display()))?
        .read_to_end(&mut bytes)?;
    let features = FeatureTable::from_bytes(&bytes).with_context(|| format!("reading {}", feat_path.display()))?;
    ensure!(
        features.dim == meta.sim.feature_dim,
        "feature dimension {} does not match scenario dimension {}",
        features.dim,
        meta.sim.feature_dim
    );

    let rows: Vec<DetectionRow> = read_rows(&dir.join(DETECTIONS_FILE))?;
    ensure!(rows.len() == meta.detections, "expected {} detections, found {}", meta.detections, rows.len());
    let mut detections = Vec::with_capacity(rows.len());
    let mut offsets = Vec::with_capacity(rows.len());
    for r in rows {
        let feature = features
            .row(r.feature_offset as usize)
            .with_context(|| format!("feature offset {} out of range", r.feature_offset))?;
        let identity = r
            .identity
            .map(|id| u32::try_from(id).context("identity out of range"))
            .transpose()?;
        detections.push(Detection {
            camera_id: r.camera,
            frame: r.frame,
            center: [r.x, r.y],
            identity,
            feature: FeatureVector::new(feature.to_vec())?,
        });
        offsets.push(r.feature_offset);
    }

    let truth = read_rows::<TruthRow>(&dir.join(TRUTH_FILE))?
        .into_iter()
        .map(|r| TruthRecord {
            camera_id: r.camera,
            frame: r.frame,
            identity: r.identity,
            center: [r.x, r.y],
        })
        .collect();

    let scenario = Scenario {
        topology: meta.sim.movement_topology(),
        config: meta.sim,
        truth,
        detections,
    };
    for d in &scenario.detections {
        if !scenario.topology.contains(d.camera_id) {
            bail!("detection in camera {} outside the scenario topology", d.camera_id);
        }
    }
    Ok(StoredScenario { scenario, offsets })
}

/// Writes one row per tracked detection, ordered as `detections`.
pub fn write_result(path: &Path, result: &TrackingResult, detections: &[Detection], offsets: &[u64]) -> anyhow::Result<()> {
    let mut ids = vec![None; detections.len()];
    for track in &result.tracks {
        for i in track.detection_indices() {
            ids[i] = Some(track.global_id);
        }
    }
    let mut w = csv::Writer::from_writer(create(path)?);
    for ((d, &offset), id) in detections.iter().zip(offsets).zip(ids) {
        let Some(id) = id else { continue };
        w.serialize(DetectionRow {
            camera: d.camera_id,
            frame: d.frame,
            identity: Some(id),
            x: d.center[0],
            y: d.center[1],
            feature_offset: offset,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a result file; every row must carry a hypothesis id.
pub fn read_result(path: &Path) -> anyhow::Result<Vec<HypothesisRecord>> {
    read_rows::<DetectionRow>(path)?
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let hypothesis = r
                .identity
                .with_context(|| format!("{}: record {} has no hypothesis id", path.display(), i + 1))?;
            ensure!(r.x.is_finite() && r.y.is_finite(), "{}: record {} has a non-finite center", path.display(), i + 1);
            Ok(HypothesisRecord {
                camera_id: r.camera,
                frame: r.frame,
                hypothesis,
                center: [r.x, r.y],
            })
        })
        .collect()
}

/// Cameras present in `truth`, for consistency checks against results.
pub fn truth_cameras(truth: &[TruthRecord]) -> BTreeSet<u32> {
    truth.iter().map(|t| t.camera_id).collect()
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(())
}
