//! Run every stage on the bundled corpus with the short test profile, then
//! run again to show that unchanged stages are skipped.
//!
//! ```text
//! cargo run --release --example full_pipeline -- [out_dir]
//! ```

use std::path::{Path, PathBuf};

use topicmap::pipeline::{run_pipeline, PipelineConfig, Stage};

fn main() -> topicmap::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "topicmap-out".into()));
    let mut cfg = PipelineConfig::test_profile();
    cfg.paths.input = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_corpus.jsonl");
    cfg.paths.output = out.clone();
    cfg.seed = 2021;

    let first = run_pipeline(&cfg, &Stage::ALL)?;
    println!("first run executed: {}", first.executed.join(" "));
    let second = run_pipeline(&cfg, &Stage::ALL)?;
    println!("second run skipped: {}", second.skipped.join(" "));

    let baseline = std::fs::read_to_string(out.join("baseline.json"))
        .map_err(|e| topicmap::Error::Input(e.to_string()))?;
    println!("baseline: {baseline}");
    println!("see {}/trajectory_plot.svg", out.display());
    Ok(())
}
