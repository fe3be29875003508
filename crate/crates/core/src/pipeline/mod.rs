//! Staged, resumable pipeline: every stage reads its predecessors' files from
//! the output directory and records content hashes in `manifest.json`, so an
//! unchanged stage is skipped on rerun.

mod config;
mod manifest;
mod stages;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

pub use config::{CorpusConfig, PathsConfig, PipelineConfig, RenderConfig};
pub use manifest::{hash_bytes, hash_file, RunManifest, StageRecord};

use crate::error::{Error, Result};
use crate::rng::derive_seed;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Embed,
    Btm,
    Select,
    Lsirm,
    Align,
    Render,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Ingest,
        Stage::Embed,
        Stage::Btm,
        Stage::Select,
        Stage::Lsirm,
        Stage::Align,
        Stage::Render,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Embed => "embed",
            Stage::Btm => "btm",
            Stage::Select => "select",
            Stage::Lsirm => "lsirm",
            Stage::Align => "align",
            Stage::Render => "render",
        }
    }

    /// Parse a comma-separated list such as `btm,select`, or `all`.
    pub fn parse_list(list: &str) -> Result<Vec<Stage>> {
        let mut out = Vec::new();
        for part in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if part == "all" {
                out.extend(Stage::ALL);
            } else {
                out.push(part.parse()?);
            }
        }
        out.sort();
        out.dedup();
        if out.is_empty() {
            return Err(Error::Config("empty stage list".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage `{s}`")))
    }
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Run the requested stages in pipeline order and return the updated manifest.
pub fn run_pipeline(cfg: &PipelineConfig, stages: &[Stage]) -> Result<RunManifest> {
    cfg.validate()?;
    let out_dir = &cfg.paths.output;
    crate::io::ensure_dir(out_dir)?;
    let manifest_path = out_dir.join(MANIFEST_FILE);
    let mut manifest = RunManifest::load_or_new(&manifest_path, cfg.seed)?;

    let mut order = stages.to_vec();
    order.sort();
    order.dedup();
    for stage in order {
        let tag = |e: Error| Error::Stage {
            stage: stage.name(),
            source: Box::new(e),
        };
        let seed = derive_seed(cfg.seed, stage.name());
        let mut inputs = stages::input_hashes(stage, cfg).map_err(tag)?;
        inputs.insert("seed".into(), seed.to_string());

        if manifest.is_fresh(stage.name(), &inputs, out_dir) {
            log::info!("{stage}: inputs unchanged, skipped");
            manifest.skipped.push(stage.name().into());
            continue;
        }
        log::info!("{stage}: running");
        let written = stages::execute(stage, cfg).map_err(tag)?;
        let outputs = written
            .iter()
            .map(|name| Ok((name.clone(), hash_file(&out_dir.join(name))?)))
            .collect::<Result<BTreeMap<_, _>>>()
            .map_err(tag)?;
        manifest.stages.insert(
            stage.name().into(),
            StageRecord {
                inputs,
                outputs,
                seed,
                finished_at: now_unix(),
            },
        );
        manifest.executed.push(stage.name().into());
        manifest.save(&manifest_path).map_err(tag)?;
    }
    manifest.save(&manifest_path)?;
    Ok(manifest)
}

/// Path of an artifact inside the configured output directory.
pub fn artifact(cfg: &PipelineConfig, name: &str) -> PathBuf {
    cfg.paths.output.join(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_lists() {
        assert_eq!(Stage::parse_list("all").unwrap(), Stage::ALL.to_vec());
        assert_eq!(
            Stage::parse_list("render, btm,btm").unwrap(),
            vec![Stage::Btm, Stage::Render]
        );
        assert!(Stage::parse_list("btm,nope").is_err());
        assert!(Stage::parse_list("").is_err());
    }
}
