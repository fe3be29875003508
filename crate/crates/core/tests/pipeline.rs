use std::path::{Path, PathBuf};
use std::process::Command;

use topicmap::pipeline::{run_pipeline, PipelineConfig, Stage};
use topicmap::Error;

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_corpus.jsonl")
}

fn config(out: &Path) -> PipelineConfig {
    let mut cfg = PipelineConfig::test_profile();
    cfg.paths.input = corpus();
    cfg.paths.output = out.to_path_buf();
    cfg
}

#[test]
fn rerun_skips_fresh_stages_and_redoes_damaged_ones() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let first = run_pipeline(&cfg, &Stage::ALL).unwrap();
    assert_eq!(first.executed.len(), 7);

    let svg = dir.path().join("trajectory_plot.svg");
    let before = std::fs::read(&svg).unwrap();
    std::fs::remove_file(&svg).unwrap();
    let second = run_pipeline(&cfg, &Stage::ALL).unwrap();
    assert_eq!(second.executed, vec!["render"]);
    assert_eq!(second.skipped.len(), 6);
    assert_eq!(std::fs::read(&svg).unwrap(), before);

    // a config change reruns the affected stage; identical outputs leave later stages fresh
    let mut changed = cfg.clone();
    changed.render.top_k = 5;
    let third = run_pipeline(&changed, &Stage::ALL).unwrap();
    assert_eq!(third.executed, vec!["render"]);

    let mut reseeded = cfg.clone();
    reseeded.seed += 1;
    let fourth = run_pipeline(&reseeded, &[Stage::Btm]).unwrap();
    assert_eq!(fourth.executed, vec!["btm"]);
}

#[test]
fn missing_upstream_artifact_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path());
    let err = run_pipeline(&cfg, &[Stage::Btm]).unwrap_err();
    let Error::Stage { stage, source } = &err else {
        panic!("expected a stage error, got {err}");
    };
    assert_eq!(*stage, "btm");
    assert!(matches!(**source, Error::MissingArtifact(_)), "{source}");
    assert!(err.to_string().contains("btm_corpus.txt") || err.to_string().contains("btm_vocabulary.txt"), "{err}");
}

#[test]
fn empty_corpus_fails_in_ingest() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.jsonl");
    std::fs::write(&input, "").unwrap();
    let mut cfg = config(&dir.path().join("out"));
    cfg.paths.input = input;
    let err = run_pipeline(&cfg, &Stage::ALL).unwrap_err();
    assert!(err.to_string().starts_with("stage `ingest` failed"), "{err}");
}

#[test]
fn cli_runs_stages_and_reports_failures() {
    let dir = tempfile::tempdir().unwrap();
    let toml = dir.path().join("run.toml");
    std::fs::write(
        &toml,
        format!(
            "seed = 5\n[paths]\ninput = {:?}\noutput = \"out\"\n",
            corpus().display().to_string()
        ),
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_topicmap");

    let ok = Command::new(bin)
        .args(["all", "--profile", "test", "--stages", "ingest,embed", "--threads", "1"])
        .arg("--config")
        .arg(&toml)
        .output()
        .unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(dir.path().join("out/btm_corpus.txt").exists());
    assert!(!dir.path().join("out/X.csv").exists());

    let single = Command::new(bin)
        .args(["btm", "--profile", "test", "--seed", "9"])
        .arg("--config")
        .arg(&toml)
        .output()
        .unwrap();
    assert!(single.status.success(), "{}", String::from_utf8_lossy(&single.stderr));
    assert!(dir.path().join("out/X.csv").exists());

    // align before lsirm has produced anything
    let failed = Command::new(bin)
        .args(["align", "--profile", "test"])
        .arg("--config")
        .arg(&toml)
        .output()
        .unwrap();
    assert!(!failed.status.success());
    let stderr = String::from_utf8_lossy(&failed.stderr);
    assert!(stderr.contains("stage `align` failed"), "{stderr}");

    let bad = Command::new(bin).args(["all", "--stages", "btm,nope"]).output().unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("unknown stage"));
}
