use mtmct_core::sampler::{self, SamplerConfig};
use mtmct_core::simgen::{self, generate, ground_truth_tracklets, measure_locality, SimConfig};
use mtmct_core::Error;

fn locality(cfg: &SimConfig) -> simgen::LocalityReport {
    let s = generate(cfg).unwrap();
    let gt = ground_truth_tracklets(&s.detections, 40).unwrap();
    measure_locality(&gt, &s.layout()).unwrap()
}

#[test]
fn standard_scenario_has_locality_ordering() {
    for seed in 0..5 {
        let r = locality(&SimConfig { seed, ..SimConfig::default() });
        assert!(r.is_ordered(), "seed {seed}: {r:?}");
    }
}

fn relative_gap(r: &simgen::LocalityReport) -> f64 {
    (r.non_adjacent_camera - r.adjacent_camera) / r.adjacent_camera
}

#[test]
fn open_topology_erases_the_neighbor_gap() {
    // Eight cameras give 7 adjacent and 21 non-adjacent pairs, enough to
    // average out individual camera maps.
    let base = SimConfig {
        cameras: 8,
        identities: 30,
        duration: 8000,
        ..SimConfig::default()
    };
    let mut open_gaps = Vec::new();
    let mut closed_gaps = Vec::new();
    for seed in 0..3 {
        open_gaps.push(relative_gap(&locality(&SimConfig {
            seed,
            open_topology: true,
            ..base.clone()
        })));
        closed_gaps.push(relative_gap(&locality(&SimConfig { seed, ..base.clone() })));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(mean(&open_gaps).abs() < 0.1, "open gaps {open_gaps:?}");
    assert!(mean(&closed_gaps) > 0.3, "closed gaps {closed_gaps:?}");
}

#[test]
fn single_camera_scenario_has_no_cross_camera_positives() {
    let s = generate(&SimConfig {
        cameras: 1,
        duration: 2000,
        ..SimConfig::default()
    })
    .unwrap();
    let gt = ground_truth_tracklets(&s.detections, 40).unwrap();
    let r = sampler::sample_inter(&gt, &s.topology, &SamplerConfig::default());
    assert_eq!(r.unwrap_err(), Error::NoCrossCameraPositives);
    assert!(sampler::sample_intra(&gt, &SamplerConfig::default()).is_ok());
}

#[test]
fn truth_and_detections_agree() {
    let s = generate(&SimConfig::default()).unwrap();
    assert_eq!(s.truth.len(), s.detections.len());
    for (t, d) in s.truth.iter().zip(&s.detections) {
        assert_eq!((t.camera_id, t.frame, Some(t.identity)), (d.camera_id, d.frame, d.identity));
        let jitter = (t.center[0] - d.center[0]).hypot(t.center[1] - d.center[1]);
        assert!(jitter <= s.match_radius());
        assert!(t.frame < s.config.duration);
    }
}

#[test]
fn miss_rate_drops_about_the_requested_fraction() {
    let full = generate(&SimConfig { miss_rate: 0.0, ..SimConfig::default() }).unwrap();
    let lossy = generate(&SimConfig { miss_rate: 0.3, ..SimConfig::default() }).unwrap();
    let kept = lossy.detections.len() as f64 / full.detections.len() as f64;
    assert!((kept - 0.7).abs() < 0.02, "kept {kept}");
}
