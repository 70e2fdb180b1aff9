use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use distomp_core::datagen::read_shard;
use distomp_core::experiments::{read_csv, CSV_HEADER};
use tempfile::TempDir;

fn distomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_distomp"))
        .args(args)
        .output()
        .expect("spawn distomp")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p
}

const CONFIG: &str = r#"{
  "gen": {"d": 60, "n": 50, "M": 4, "K": 3, "alpha": 0.0, "sigma": 1.0,
          "theta_min": 0.8, "master_seed": 11},
  "experiment": {"theta_min_grid": [0.3, 0.9], "trials": 4,
                 "algorithms": ["single", "ds:3", "dj", "djf:4", "dc"]},
  "theory": {"d": 2000, "K": 1, "n": 1800, "sigma": 1.0, "mu_max": 0.6,
             "theta_min_scaled": 10.0, "epsilon": 0.5},
  "machines_available": 100
}"#;

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn simulate_is_byte_reproducible() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let cfg = cfg.to_str().unwrap();
    for algo in ["single", "centralized", "ds:3", "dj", "djf:4", "dc"] {
        let a = distomp(&["simulate", "--config", cfg, "--algo", algo]);
        let b = distomp(&["simulate", "--config", cfg, "--algo", algo]);
        assert_eq!(a.status.code(), Some(0), "{algo}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{algo}");
        assert!(stdout(&a).contains(&format!("algorithm      {algo}")));
    }
    let dj = stdout(&distomp(&["simulate", "--config", cfg, "--algo", "dj"]));
    // d = 60 gives 6 bits per index; (2K - 1) * M * 6 = 5 * 4 * 6
    assert!(dj.contains("bits           120"), "{dj}");

    let s1 = distomp(&["simulate", "--config", cfg, "--algo", "dj", "--seed", "1"]);
    assert!(stdout(&s1).contains("seed           1\n"));
}

#[test]
fn unknown_key_is_a_config_error_naming_the_key() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"gen": {"d": 60, "n": 50, "M": 4, "K": 3, "sigma": 1.0, "theta_min": 0.8, "thetamin": 1}}"#,
    );
    let o = distomp(&["simulate", "--config", cfg.to_str().unwrap(), "--algo", "dj"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("thetamin"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn bad_values_and_arguments_exit_one() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let cfg = cfg.to_str().unwrap();
    let bad_algo = distomp(&["simulate", "--config", cfg, "--algo", "ds:0"]);
    assert_eq!(bad_algo.status.code(), Some(1));
    let missing = distomp(&["simulate", "--config", "/nonexistent/config.json", "--algo", "dj"]);
    assert_eq!(missing.status.code(), Some(1));
    let no_such_flag = distomp(&["simulate", "--bogus"]);
    assert_eq!(no_such_flag.status.code(), Some(1));
    let pattern = write_config(
        dir.path(),
        r#"{"gen": {"d": 60, "n": 50, "M": 4, "K": 2, "sigma": 1.0, "theta_min": 0.8}}"#,
    );
    let o = distomp(&["simulate", "--config", pattern.to_str().unwrap(), "--algo", "dj"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(distomp(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_failure_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = distomp(&[
        "datagen",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        "/nonexistent/dir/shard.bin",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn datagen_writes_a_readable_shard() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let out = dir.path().join("m0.bin");
    let o = distomp(&[
        "datagen",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "99",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bytes = fs::read(&out).unwrap();
    assert_eq!(bytes.len(), 4 + 2 + 4 + 4 + 8 + 8 * (50 * 60 + 50));
    let (shard, seed) = read_shard(&mut bytes.as_slice()).unwrap();
    assert_eq!((shard.samples(), shard.dim(), seed), (50, 60, 99));
}

#[test]
fn sweep_writes_csv_and_manifest() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let csv = dir.path().join("curve.csv");
    let o = distomp(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER.join(",").as_str()));
    let points = read_csv(&csv).unwrap();
    assert_eq!(points.len(), 2 * 5);
    assert!(points.iter().all(|p| p.trials == 4 && p.successes <= 4));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("curve.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["master_seed"], 11);
    assert_eq!(manifest["version"], "v0.1.0");

    // same seed, same bytes
    let again = dir.path().join("again.csv");
    distomp(&["sweep", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(fs::read(&again).unwrap(), text.as_bytes());
}

#[test]
fn sweep_without_output_path_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = distomp(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn theory_reports_failed_coherence_and_exits_zero() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), CONFIG);
    let o = distomp(&["theory", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let line = text
        .lines()
        .find(|l| l.starts_with("coherence hypothesis"))
        .expect("coherence line");
    assert!(line.ends_with("FAIL"), "{line}");
    let json: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(json["coherence_ok"], false);
}
