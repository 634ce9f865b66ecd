use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL: &str = "duration = 1500\nidentities = 8\npairs_requested = 1000\nepochs_initial = 4\nepochs_decay = 1\ncompare_seeds = 1\n";

fn mtmct(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mtmct"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn workspace(config: &str) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), config).unwrap();
    let o = mtmct(dir.path(), &["--config", "run.toml", "simulate", "--out", "sc"]);
    assert!(o.status.success(), "{}", stderr(&o));
    dir
}

fn score(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")))
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn simulate_writes_all_files_and_a_summary() {
    let dir = workspace(SMALL);
    for f in ["scenario.meta", "detections.txt", "features.bin", "truth.txt"] {
        assert!(dir.path().join("sc").join(f).is_file(), "{f} missing");
    }
    let o = mtmct(dir.path(), &["--config", "run.toml", "simulate", "--out", "again"]);
    let out = stdout(&o);
    assert!(out.contains("identities 8"));
    assert!(out.contains("locality_ordered"));
}

#[test]
fn missing_or_bad_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = mtmct(dir.path(), &["--config", "absent.toml", "simulate", "--out", "sc"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("absent.toml"));
    std::fs::write(dir.path().join("bad.toml"), "cameras = \"four\"\n").unwrap();
    let o = mtmct(dir.path(), &["--config", "bad.toml", "simulate", "--out", "sc"]);
    assert!(!o.status.success());
    assert!(!dir.path().join("sc").exists());
}

#[test]
fn oracle_tracking_scores_perfectly_and_writes_scores() {
    let dir = workspace(SMALL);
    let o = mtmct(dir.path(), &["track", "sc", "--sct", "oracle", "--mct", "oracle", "--out", "r.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mtmct(dir.path(), &["evaluate", "sc", "r.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = stdout(&o);
    assert_eq!(score(&report, "sct.idf1"), 1.0);
    assert_eq!(score(&report, "mct.idf1"), 1.0);
    assert_eq!(std::fs::read_to_string(dir.path().join("r.txt.scores")).unwrap(), report);
}

#[test]
fn baseline_and_metric_variants_track() {
    let dir = workspace(SMALL);
    let p = dir.path();
    let o = mtmct(p, &["track", "sc", "--out", "base.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for mode in ["intra", "inter"] {
        let o = mtmct(p, &["--config", "run.toml", "train-metric", "sc", "--mode", mode, "--out", &format!("{mode}.bin")]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let o = mtmct(p, &["track", "sc", "--sct", "intra:intra.bin", "--mct", "inter:inter.bin", "--out", "ours.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(p.join("ours.txt").is_file());

    // Named scorers resolve through the config.
    std::fs::write(p.join("named.toml"), "intra_metric = \"intra.bin\"\ninter_metric = \"inter.bin\"\n").unwrap();
    let o = mtmct(p, &["--config", "named.toml", "track", "sc", "--sct", "intra", "--mct", "inter", "--out", "named.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(p.join("named.txt")).unwrap(), std::fs::read(p.join("ours.txt")).unwrap());
}

#[test]
fn invalid_metric_path_fails() {
    let dir = workspace(SMALL);
    let o = mtmct(dir.path(), &["track", "sc", "--mct", "inter:missing.bin", "--out", "r.txt"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("missing.bin"));
    let o = mtmct(dir.path(), &["track", "sc", "--mct", "inter", "--out", "r.txt"]);
    assert!(!o.status.success());
}

#[test]
fn malformed_and_empty_results() {
    let dir = workspace(SMALL);
    let p = dir.path();
    std::fs::write(p.join("bad.txt"), "camera,frame,identity,x,y,feature_offset\n1,2,three,0,0,0\n").unwrap();
    assert!(!mtmct(p, &["evaluate", "sc", "bad.txt"]).status.success());

    std::fs::write(p.join("empty.txt"), "camera,frame,identity,x,y,feature_offset\n").unwrap();
    let o = mtmct(p, &["evaluate", "sc", "empty.txt"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(score(&stdout(&o), "mct.idf1"), 0.0);
    assert_eq!(score(&stdout(&o), "sct.idf1"), 0.0);

    std::fs::write(p.join("alien.txt"), "camera,frame,identity,x,y,feature_offset\n99,1300,1,0,0,0\n").unwrap();
    let o = mtmct(p, &["evaluate", "sc", "alien.txt"]);
    assert!(!o.status.success());
}

#[test]
fn single_camera_scenario_degrades_gracefully() {
    let dir = workspace(&format!("{SMALL}cameras = 1\n"));
    let p = dir.path();
    let o = mtmct(p, &["--config", "run.toml", "train-metric", "sc", "--mode", "inter", "--out", "inter.bin"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("no cross-camera positives"), "{}", stderr(&o));
    assert!(!p.join("inter.bin").exists());

    let o = mtmct(p, &["--config", "run.toml", "compare", "sc"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let has_inter = row.split_whitespace().next().unwrap().contains("inter");
        assert_eq!(row.contains("n/a"), has_inter, "{row}");
    }
}

#[test]
fn sweep_emits_one_row_per_window_and_level() {
    let dir = workspace(SMALL);
    let o = mtmct(dir.path(), &["--config", "run.toml", "compare", "sc", "--sweep", "tau_m", "--grid", "150,600,2400,9600"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    for level in ["sct", "mct"] {
        let windows: Vec<&str> = out
            .lines()
            .filter(|l| l.starts_with(level))
            .map(|l| l.split_whitespace().nth(1).unwrap())
            .collect();
        assert_eq!(windows, ["150", "600", "2400", "9600"]);
    }
    assert!(!mtmct(dir.path(), &["compare", "sc", "--grid", "5"]).status.success());
    assert!(!mtmct(dir.path(), &["compare", "sc", "--sweep", "tau_q"]).status.success());
}

#[test]
fn intra_metric_on_standard_scenario_trains_well() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert!(mtmct(p, &["simulate", "--out", "sc"]).status.success());
    let o = mtmct(p, &["train-metric", "sc", "--mode", "intra", "--out", "intra.bin"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let acc: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("train_accuracy "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(acc >= 0.9, "accuracy {acc}");
    let net: PathBuf = p.join("intra.bin");
    assert!(std::fs::metadata(net).unwrap().len() > 0);
}
