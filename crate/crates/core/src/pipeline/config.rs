use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::align::ObliminConfig;
use crate::btm::BtmConfig;
use crate::corpus::{EmbeddingConfig, FilterConfig};
use crate::error::{Error, Result};
use crate::lsirm::LsirmConfig;
use crate::wordselect::SelectionConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    /// JSONL corpus, one document per line.
    pub input: PathBuf,
    /// Optional extra stoplist, one token per line.
    pub stoplist: Option<PathBuf>,
    /// Directory receiving every artifact and the run manifest.
    pub output: PathBuf,
}

impl Default for PathsConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("corpus.jsonl"),
            stoplist: None,
            output: PathBuf::from("topicmap-out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    pub filter: FilterConfig,
    pub embedding: EmbeddingConfig,
    /// Extra keywords on top of the per-document ones.
    pub keywords: Vec<String>,
    pub use_document_keywords: bool,
    /// Embedding neighbors added per keyword.
    pub neighbors: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            filter: FilterConfig::default(),
            embedding: EmbeddingConfig::default(),
            keywords: Vec::new(),
            use_document_keywords: true,
            neighbors: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderConfig {
    /// Words per topic in the report.
    pub top_k: usize,
    /// Trajectory labels by topic; missing or empty entries fall back to the topic number.
    pub topic_labels: Vec<String>,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            top_k: 30,
            topic_labels: Vec::new(),
        }
    }
}

/// Whole-run configuration. Stage seeds are derived from `seed`; the `seed`
/// fields inside module sections are overwritten at run time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Worker threads for per-level LSIRM fits and embedding training.
    /// Only `1` gives byte-identical reruns.
    pub threads: usize,
    pub paths: PathsConfig,
    pub corpus: CorpusConfig,
    pub btm: BtmConfig,
    pub wordselect: SelectionConfig,
    pub lsirm: LsirmConfig,
    pub align: ObliminConfig,
    pub render: RenderConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            threads: 1,
            paths: PathsConfig::default(),
            corpus: CorpusConfig::default(),
            btm: BtmConfig::default(),
            wordselect: SelectionConfig::default(),
            lsirm: LsirmConfig::default(),
            align: ObliminConfig::default(),
            render: RenderConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Shortened chains and a small embedding for smoke runs and tests. Model
    /// constants (K, α, β, levels, priors, proposal scales) keep their defaults.
    pub fn test_profile() -> Self {
        let mut cfg = Self::default();
        cfg.shorten_for_testing();
        cfg
    }

    /// Apply the test-profile chain lengths and embedding size in place.
    pub fn shorten_for_testing(&mut self) {
        self.corpus.embedding.dim = 32;
        self.corpus.embedding.epochs = 3;
        self.corpus.embedding.negatives = 5;
        self.btm.burn_in = 300;
        self.btm.iterations = 500;
        self.btm.thin = 10;
        self.lsirm.iterations = 2_500;
        self.lsirm.burn_in = 500;
        self.lsirm.thin = 5;
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Load a TOML file. Relative paths inside it are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.paths.input = resolve(base, &cfg.paths.input);
        cfg.paths.output = resolve(base, &cfg.paths.output);
        cfg.paths.stoplist = cfg.paths.stoplist.as_deref().map(|p| resolve(base, p));
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        if self.render.top_k == 0 {
            return Err(Error::Config("render.top_k must be at least 1".into()));
        }
        self.corpus.embedding.validate()?;
        self.btm.validate()?;
        self.wordselect.levels()?;
        self.lsirm.validate()?;
        if !(self.align.tolerance > 0.0) || self.align.max_iterations == 0 {
            return Err(Error::Config("align needs a positive tolerance and iteration cap".into()));
        }
        Ok(())
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}
