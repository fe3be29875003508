//! Topic maps for short-text corpora.
//!
//! The crate chains five steps, each usable on its own:
//!
//! - [`corpus`]: JSONL ingestion, token filtering, skip-gram embeddings and
//!   keyword vocabulary expansion.
//! - [`btm`]: biterm extraction and a collapsed Gibbs sampler for the biterm
//!   topic model, giving the word-by-topic matrix X.
//! - [`wordselect`]: discriminative word scores and the nested sequence of
//!   row subsets of X, from the 60% level down to 40%.
//! - [`lsirm`]: a Gaussian latent space item response model fitted by MCMC
//!   to each matrix, giving 2-D topic positions.
//! - [`align`] and [`render`]: Procrustes alignment to a baseline level,
//!   oblimin rotation, trajectories and SVG plots.
//!
//! [`pipeline`] runs everything as resumable stages that exchange CSV files.
//! Every random draw comes from a seeded ChaCha stream ([`rng`]), so a
//! single-threaded run is reproducible byte for byte.
//!
//! ```no_run
//! use topicmap::pipeline::{run_pipeline, PipelineConfig, Stage};
//!
//! let mut cfg = PipelineConfig::test_profile();
//! cfg.paths.input = "abstracts.jsonl".into();
//! cfg.paths.output = "out".into();
//! let manifest = run_pipeline(&cfg, &Stage::ALL)?;
//! println!("ran {:?}", manifest.executed);
//! # Ok::<(), topicmap::Error>(())
//! ```

pub mod align;
pub mod btm;
pub mod corpus;
pub mod error;
pub mod io;
pub mod lsirm;
pub mod pipeline;
pub mod render;
pub mod rng;
pub mod synthetic;
pub mod wordselect;

pub use error::{Error, Result};
