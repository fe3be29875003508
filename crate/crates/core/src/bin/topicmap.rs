use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use topicmap::pipeline::{run_pipeline, PipelineConfig, Stage};

#[derive(Parser)]
#[command(name = "topicmap", version, about = "Topic maps and trajectories from short-text corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration. Missing keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed, overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated stages to run with `all`, e.g. `btm,select`.
    #[arg(long, global = true)]
    stages: Option<String>,

    /// Worker threads. Only 1 gives byte-identical reruns.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// `test` shortens every chain and the embedding on top of the config.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Default)]
    profile: Profile,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Default,
    /// Short chains and a small embedding.
    Test,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Read the JSONL corpus, tokenize and filter.
    Ingest,
    /// Train word embeddings and expand the keyword vocabulary.
    Embed,
    /// Fit the biterm topic model.
    Btm,
    /// Build the word-selection matrix sequence.
    Select,
    /// Fit one latent space model per selection level.
    Lsirm,
    /// Procrustes alignment, oblimin rotation and trajectories.
    Align,
    /// Plots and the topic report.
    Render,
    /// Every stage in order (or those named by --stages).
    All,
}

fn stages_for(cmd: Command, list: Option<&str>) -> topicmap::Result<Vec<Stage>> {
    let single = match cmd {
        Command::Ingest => Stage::Ingest,
        Command::Embed => Stage::Embed,
        Command::Btm => Stage::Btm,
        Command::Select => Stage::Select,
        Command::Lsirm => Stage::Lsirm,
        Command::Align => Stage::Align,
        Command::Render => Stage::Render,
        Command::All => return Stage::parse_list(list.unwrap_or("all")),
    };
    Ok(vec![single])
}

fn run(cli: &Cli) -> topicmap::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Profile::Test = cli.profile {
        cfg.shorten_for_testing();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    let stages = stages_for(cli.command, cli.stages.as_deref())?;
    let manifest = run_pipeline(&cfg, &stages)?;
    println!(
        "ran [{}], skipped [{}], artifacts in {}",
        manifest.executed.join(", "),
        manifest.skipped.join(", "),
        cfg.paths.output.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
