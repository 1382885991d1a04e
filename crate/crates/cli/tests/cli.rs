use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn dirgram(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirgram"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .env_remove("DIRGRAM_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn synth(dir: &Path, name: &str, kind: &str, seed: &str) -> PathBuf {
    let path = dir.join(name);
    let out = dirgram(&[
        "synth",
        "--kind",
        kind,
        "--sentences",
        "300",
        "--seed",
        seed,
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn config(dir: &Path, corpus: &str, extra: &str) -> PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(
        &path,
        format!(
            "seed = 3\n{extra}\n[bootstrap]\nreplicates = 100\n\n[[corpus]]\nid = \"toy\"\npath = {corpus:?}\nformat = \"plaintext\"\nmode = \"baseline\"\ngold = \"LTR\"\n"
        ),
    )
    .unwrap();
    path
}

fn setup() -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let corpus = synth(dir.path(), "markov.txt", "markov-biased", "5");
    let cfg = config(dir.path(), corpus.to_str().unwrap(), "");
    (dir, cfg)
}

#[test]
fn synth_is_deterministic_under_seed() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["uniform-iid", "markov-biased", "zipf-words"] {
        let a = std::fs::read(synth(dir.path(), "a.txt", kind, "9")).unwrap();
        let b = std::fs::read(synth(dir.path(), "b.txt", kind, "9")).unwrap();
        let c = std::fs::read(synth(dir.path(), "c.txt", kind, "10")).unwrap();
        assert_eq!(a, b, "{kind}");
        assert_ne!(a, c, "{kind}");
        assert_eq!(a.iter().filter(|&&b| b == b'\n').count(), 300, "{kind}");
    }
}

#[test]
fn missing_corpus_path_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        dir.path().join("absent.txt").to_str().unwrap(),
        "",
    );
    let out = dirgram(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.txt"));
}

#[test]
fn empty_corpus_path_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "", "");
    assert_eq!(
        code(&dirgram(&["analyze", "--config", cfg.to_str().unwrap()])),
        2
    );
}

#[test]
fn unparsable_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "n = [2, 3\n").unwrap();
    assert_eq!(
        code(&dirgram(&["analyze", "--config", cfg.to_str().unwrap()])),
        2
    );
}

#[test]
fn bad_parameters_are_config_errors() {
    let (_dir, cfg) = setup();
    let cfg = cfg.to_str().unwrap();
    assert_eq!(code(&dirgram(&["analyze", "--config", cfg, "--n", "1"])), 2);
    assert_eq!(
        code(&dirgram(&["analyze", "--config", cfg, "--alpha", "1.5"])),
        2
    );
    assert_eq!(
        code(&dirgram(&[
            "predict",
            "--config",
            cfg,
            "--train-fraction",
            "1"
        ])),
        2
    );
    let threads = Command::new(env!("CARGO_BIN_EXE_dirgram"))
        .args(["analyze", "--config", cfg])
        .env("DIRGRAM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&threads), 2);
}

#[test]
fn undecodable_corpus_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("latin1.txt");
    std::fs::write(&corpus, b"caf\xe9 au lait\n").unwrap();
    let cfg = config(dir.path(), corpus.to_str().unwrap(), "");
    assert_eq!(
        code(&dirgram(&["analyze", "--config", cfg.to_str().unwrap()])),
        3
    );
}

#[test]
fn malformed_eva_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.eva");
    std::fs::write(&corpus, "<f1r.1;H>  daiin.{unclosed\n").unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "[[corpus]]\nid = \"v\"\npath = {:?}\nformat = \"eva\"\nmode = \"baseline\"\ngold = \"RTL\"\n",
            corpus.to_str().unwrap()
        ),
    )
    .unwrap();
    assert_eq!(
        code(&dirgram(&["analyze", "--config", cfg.to_str().unwrap()])),
        3
    );
}

#[test]
fn report_without_inputs_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&dirgram(&["report", "--out", dir.path().to_str().unwrap()])),
        3
    );
}

#[test]
fn analyze_envelope_records_provenance() {
    let (dir, cfg) = setup();
    let out_dir = dir.path().join("out");
    let out = dirgram(&[
        "analyze",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "2,3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("analyze.json")).unwrap())
            .unwrap();
    assert_eq!(json["tool"], "dirgram");
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(json["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(json["timestamp"]["unix_seconds"], 1_700_000_000);
    assert_eq!(json["config"]["seed"], 3);
    assert!(!json["seeds"].as_object().unwrap().is_empty());
    assert_eq!(json["results"]["cells"].as_array().unwrap().len(), 4);

    let csv = std::fs::read_to_string(out_dir.join("analyze.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(out_dir.join("analyze.md").exists());
}

#[test]
fn config_hash_ignores_output_location() {
    let (dir, cfg) = setup();
    let hash = |sub: &str, format: &str| {
        let d = dir.path().join(sub);
        let out = dirgram(&[
            "boundary",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            d.to_str().unwrap(),
            "--format",
            format,
        ]);
        assert_eq!(code(&out), 0);
        let v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(d.join("boundary.json")).unwrap())
                .unwrap();
        v["config_hash"].as_str().unwrap().to_owned()
    };
    assert_eq!(hash("a", "json"), hash("b", "json,csv"));
}

#[test]
fn boundary_writes_rank_frequency_curves() {
    let (dir, cfg) = setup();
    let out_dir = dir.path().join("out");
    let out = dirgram(&[
        "boundary",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let curves = std::fs::read_to_string(out_dir.join("curves-toy.csv")).unwrap();
    let mut lines = curves.lines();
    assert_eq!(
        lines.next(),
        Some("rank,count,log_rank,log_count,position,corpus_id")
    );
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[5], "toy");
}

#[test]
fn report_merges_every_available_section() {
    let (dir, cfg) = setup();
    let out_dir = dir.path().join("out");
    let cfg = cfg.to_str().unwrap();
    let o = out_dir.to_str().unwrap();
    for command in ["analyze", "shuffle-control", "predict", "boundary"] {
        let out = dirgram(&[command, "--config", cfg, "--out", o, "--format", "json"]);
        assert_eq!(
            code(&out),
            0,
            "{command}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = dirgram(&["report", "--out", o]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let md = std::fs::read_to_string(out_dir.join("report.md")).unwrap();
    assert!(md.starts_with("# dirgram report"));
    assert_eq!(md.matches("\n## ").count(), 4, "{md}");
}

#[test]
fn flags_override_config_values() {
    let (dir, cfg) = setup();
    let out_dir = dir.path().join("out");
    let out = dirgram(&[
        "predict",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "77",
        "--n",
        "3",
        "--out",
        out_dir.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("predict.json")).unwrap())
            .unwrap();
    assert_eq!(v["config"]["seed"], 77);
    assert_eq!(v["config"]["n"], serde_json::json!([3]));
    assert!(!out_dir.join("predict.csv").exists());
}
