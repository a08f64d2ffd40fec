use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qperc")).args(args).output().unwrap()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

#[test]
fn bad_config_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.conf", "[experiment]\nno_such_key = 1\n");
    let out = qperc(&["xor-bench", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such_key"));
}

#[test]
fn unknown_preset_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "m.conf", "[experiment]\npreset = fourier\n");
    let out = qperc(&["markov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_dataset_exits_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let data = write(dir.path(), "empty.csv", "# nothing here\n");
    let out = qperc(&["train", "--dataset", data.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let header_only = write(dir.path(), "header.csv", "inputs=2,targets=1\n");
    let out = qperc(&["train", "--dataset", header_only.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    for name in ["configs/xor.conf", "configs/depth.conf", "configs/markov.conf"] {
        qperc_cli::ExperimentConfig::load(&repo_file(name)).unwrap();
    }
}

#[test]
fn train_on_shipped_xor_matches_bench_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (train_dir, bench_dir) = (dir.path().join("train"), dir.path().join("bench"));
    let data = repo_file("data/xor.csv");
    let out = qperc(&[
        "train",
        "--dataset",
        data.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        train_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = qperc(&["xor-bench", "--seed", "3", "--out", bench_dir.to_str().unwrap()]);
    assert!(out.status.success());

    let trained = csv_rows(&train_dir.join("runs.csv"));
    let bench: Vec<Vec<String>> = csv_rows(&bench_dir.join("runs.csv"))
        .into_iter()
        .filter(|r| r[1] == "derivative_free")
        .collect();
    assert_eq!(trained.len(), 100);
    assert_eq!(trained, bench);
    assert!(train_dir.join("weights-s3.txt").exists());
}

#[test]
fn markov_hadamard_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let had = dir.path().join("had");
    let out = qperc(&["markov", "--out", had.to_str().unwrap()]);
    assert!(out.status.success());
    let t = csv_rows(&had.join("transitions.csv"));
    assert_eq!(t.len(), 4);
    for row in &t {
        let p: f64 = row[2].parse().unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }
    let chain = csv_rows(&had.join("chain.csv"));
    assert_eq!(chain.len(), 100_001);
    let ones = chain.iter().filter(|r| r[1] == "1").count() as f64 / chain.len() as f64;
    assert!((ones - 0.5).abs() < 0.01);

    let cfg = write(dir.path(), "id.conf", "[experiment]\npreset = identity(3)\nsteps = 50\nstart = 2\n");
    let id = dir.path().join("id");
    let out = qperc(&["markov", "--config", cfg.to_str().unwrap(), "--out", id.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(csv_rows(&id.join("chain.csv")).iter().all(|r| r[1] == "2"));
    for row in csv_rows(&id.join("empirical.csv")) {
        let f: f64 = row[2].parse().unwrap_or(f64::NAN);
        if row[1] == "2" {
            assert_eq!(f, if row[0] == "2" { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn depth_bench_writes_one_row_per_layer() {
    let dir = tempfile::tempdir().unwrap();
    let out = qperc(&["depth-bench", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("depth.csv"));
    let layers: usize = [1, 2, 4, 8, 16, 32].iter().sum();
    assert_eq!(rows.len(), 2 * layers);
    for r in rows.iter().filter(|r| r[0] == "derivative_free") {
        assert_eq!(r[3], "188");
        assert_eq!(r[4], "0");
    }
}
