//! Skip-gram word embeddings trained with negative sampling.
//!
//! For a (center, context) pair with sampled negatives the loss is
//!
//! ```text
//! L = -ln σ(c·w) - Σ_k ln σ(-c·n_k)
//! ```
//!
//! where `w` is the center's input vector and `c`, `n_k` are output (context)
//! vectors. Training walks every position of every document, pairs it with
//! each neighbor inside a fixed window, and takes one exact gradient step on
//! `L` with a linearly decaying learning rate.

use std::cell::UnsafeCell;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::tokenize::{TokenizedCorpus, Vocabulary};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, seeded, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    pub dim: usize,
    /// Positions on each side of the center that count as context.
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Floor of the decayed learning rate, as a fraction of the initial rate.
    pub min_learning_rate_fraction: f64,
    /// Exponent applied to unigram counts for the negative-sampling distribution.
    pub noise_exponent: f64,
    /// Worker threads. More than one trains lock-free in parallel and is not
    /// reproducible across runs.
    pub threads: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dim: 256,
            window: 2,
            negatives: 20,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate_fraction: 1e-4,
            noise_exponent: 0.75,
            threads: 1,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        if self.window == 0 {
            return Err(Error::Config("embedding window must be at least 1".into()));
        }
        if self.negatives == 0 {
            return Err(Error::Config("negative samples must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub vocabulary: Vocabulary,
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    /// Row-major `M x dim` input (center) vectors.
    input: Vec<f64>,
    /// Row-major `M x dim` output (context) vectors.
    output: Vec<f64>,
}

impl EmbeddingModel {
    pub fn from_vectors(
        vocabulary: Vocabulary,
        dim: usize,
        input: Vec<f64>,
        output: Vec<f64>,
    ) -> Result<Self> {
        let m = vocabulary.len();
        if dim == 0 || input.len() != m * dim || output.len() != m * dim {
            return Err(Error::Shape(format!(
                "expected {m} x {dim} input and output vectors"
            )));
        }
        Ok(Self {
            vocabulary,
            dim,
            window: 0,
            negatives: 0,
            input,
            output,
        })
    }

    pub fn input_vector(&self, w: usize) -> &[f64] {
        &self.input[w * self.dim..(w + 1) * self.dim]
    }

    pub fn output_vector(&self, w: usize) -> &[f64] {
        &self.output[w * self.dim..(w + 1) * self.dim]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.vocabulary.lookup(word).map(|w| self.input_vector(w))
    }

    pub fn cosine(&self, a: usize, b: usize) -> f64 {
        cosine(self.input_vector(a), self.input_vector(b))
    }

    /// Words ranked by cosine similarity to `w`, excluding `w`; ties by index.
    pub fn nearest(&self, w: usize, k: usize) -> Vec<(usize, f64)> {
        let query = self.input_vector(w);
        let mut scored: Vec<(usize, f64)> = (0..self.vocabulary.len())
            .filter(|&o| o != w)
            .map(|o| (o, cosine(query, self.input_vector(o))))
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        scored
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(&self.output).all(|v| v.is_finite())
    }

    /// CSV of input vectors: `word,e_1..e_d`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        let header: Vec<String> = std::iter::once("word".to_string())
            .chain((1..=self.dim).map(|i| format!("e_{i}")))
            .collect();
        writeln!(out, "{}", header.join(",")).map_err(|e| Error::io(path, e))?;
        for (w, word) in self.vocabulary.tokens().iter().enumerate() {
            write!(out, "{word}").map_err(|e| Error::io(path, e))?;
            for v in self.input_vector(w) {
                write!(out, ",{}", crate::io::fmt_f64(*v)).map_err(|e| Error::io(path, e))?;
            }
            writeln!(out).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot(a, b) / (na * nb)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln σ(x)` without overflow.
fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Negative-sampling loss of one (center, context) pair.
pub fn pair_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let mut loss = -log_sigmoid(dot(center, context));
    for n in negatives {
        loss -= log_sigmoid(-dot(center, n));
    }
    loss
}

/// Gradients of [`pair_loss`] with respect to each vector involved.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGradient {
    pub center: Vec<f64>,
    pub context: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

pub fn pair_gradient(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> PairGradient {
    let dim = center.len();
    let mut g_center = vec![0.0; dim];

    // d/ds of -ln σ(s) is σ(s) - 1
    let coef = sigmoid(dot(center, context)) - 1.0;
    let g_context: Vec<f64> = center.iter().map(|c| coef * c).collect();
    for (g, x) in g_center.iter_mut().zip(context) {
        *g += coef * x;
    }

    // d/ds of -ln σ(-s) is σ(s)
    let g_negs = negatives
        .iter()
        .map(|n| {
            let coef = sigmoid(dot(center, n));
            for (g, x) in g_center.iter_mut().zip(n.iter()) {
                *g += coef * x;
            }
            center.iter().map(|c| coef * c).collect()
        })
        .collect();

    PairGradient {
        center: g_center,
        context: g_context,
        negatives: g_negs,
    }
}

/// Context positions of `center` in `doc` under a fixed symmetric window.
pub fn context_positions(len: usize, center: usize, window: usize) -> impl Iterator<Item = usize> {
    let lo = center.saturating_sub(window);
    let hi = (center + window + 1).min(len);
    (lo..hi).filter(move |&p| p != center)
}

struct NoiseTable(WeightedIndex<f64>);

impl NoiseTable {
    fn new(counts: &[u64], exponent: f64) -> Result<Self> {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
        WeightedIndex::new(&weights)
            .map(Self)
            .map_err(|e| Error::Input(format!("cannot build negative-sampling table: {e}")))
    }

    fn sample(&self, rng: &mut Rng) -> usize {
        self.0.sample(rng)
    }
}

/// Shared parameter buffer for lock-free parallel SGD. Concurrent writers may
/// race on the same row; that is the accepted trade-off of the parallel mode.
struct Hogwild(UnsafeCell<Vec<f64>>);

unsafe impl Sync for Hogwild {}

impl Hogwild {
    #[allow(clippy::mut_from_ref)]
    unsafe fn get(&self) -> &mut Vec<f64> {
        &mut *self.0.get()
    }
}

struct Trainer<'a> {
    dim: usize,
    window: usize,
    negatives: usize,
    noise: &'a NoiseTable,
    lr0: f64,
    lr_floor: f64,
    total_steps: f64,
}

impl Trainer<'_> {
    fn learning_rate(&self, step: u64) -> f64 {
        let frac = 1.0 - step as f64 / self.total_steps;
        self.lr0 * frac.max(self.lr_floor)
    }

    /// One SGD step on a (center, context) pair.
    fn step(
        &self,
        input: &mut [f64],
        output: &mut [f64],
        center: usize,
        context: usize,
        rng: &mut Rng,
        lr: f64,
        scratch: &mut Vec<usize>,
    ) {
        let dim = self.dim;
        scratch.clear();
        for _ in 0..self.negatives {
            let n = self.noise.sample(rng);
            if n != context {
                scratch.push(n);
            }
        }

        let row = |m: &[f64], w: usize| m[w * dim..(w + 1) * dim].to_vec();
        let c_vec = row(input, center);
        let ctx_vec = row(output, context);
        let neg_vecs: Vec<Vec<f64>> = scratch.iter().map(|&n| row(output, n)).collect();
        let neg_refs: Vec<&[f64]> = neg_vecs.iter().map(Vec::as_slice).collect();
        let grad = pair_gradient(&c_vec, &ctx_vec, &neg_refs);

        for (x, g) in output[context * dim..(context + 1) * dim]
            .iter_mut()
            .zip(&grad.context)
        {
            *x -= lr * g;
        }
        for (&n, g_n) in scratch.iter().zip(&grad.negatives) {
            for (x, g) in output[n * dim..(n + 1) * dim].iter_mut().zip(g_n) {
                *x -= lr * g;
            }
        }
        for (x, g) in input[center * dim..(center + 1) * dim]
            .iter_mut()
            .zip(&grad.center)
        {
            *x -= lr * g;
        }
    }

    fn run_docs(
        &self,
        docs: &[Vec<usize>],
        input: &mut [f64],
        output: &mut [f64],
        rng: &mut Rng,
        mut step: u64,
        step_stride: u64,
    ) -> f64 {
        let mut scratch = Vec::with_capacity(self.negatives);
        let mut last_lr = self.lr0;
        for doc in docs {
            for center in 0..doc.len() {
                let lr = self.learning_rate(step);
                last_lr = lr;
                step += step_stride;
                for p in context_positions(doc.len(), center, self.window) {
                    self.step(input, output, doc[center], doc[p], rng, lr, &mut scratch);
                }
            }
        }
        last_lr
    }
}

/// Train skip-gram embeddings on `corpus`.
///
/// With `cfg.threads == 1` the result is a pure function of `(corpus, cfg, seed)`.
pub fn train_embeddings(
    corpus: &TokenizedCorpus,
    cfg: &EmbeddingConfig,
    seed: u64,
) -> Result<EmbeddingModel> {
    cfg.validate()?;
    let m = corpus.vocab_size();
    if m < 2 {
        return Err(Error::Input(
            "embedding training needs at least two distinct tokens".into(),
        ));
    }
    let dim = cfg.dim;
    let noise = NoiseTable::new(&corpus.unigram_counts(), cfg.noise_exponent)?;

    let mut rng = seeded(seed);
    let half = 0.5 / dim as f64;
    let mut input: Vec<f64> = (0..m * dim).map(|_| rng.random_range(-half..half)).collect();
    let mut output = vec![0.0; m * dim];

    let tokens_per_epoch = corpus.num_tokens() as u64;
    let trainer = Trainer {
        dim,
        window: cfg.window,
        negatives: cfg.negatives,
        noise: &noise,
        lr0: cfg.learning_rate,
        lr_floor: cfg.min_learning_rate_fraction,
        total_steps: (tokens_per_epoch * cfg.epochs as u64).max(1) as f64,
    };

    let threads = cfg.threads.max(1);
    for epoch in 0..cfg.epochs {
        let base = epoch as u64 * tokens_per_epoch;
        if threads == 1 {
            trainer.run_docs(&corpus.documents, &mut input, &mut output, &mut rng, base, 1);
        } else {
            let shared_in = Hogwild(UnsafeCell::new(std::mem::take(&mut input)));
            let shared_out = Hogwild(UnsafeCell::new(std::mem::take(&mut output)));
            let chunk = corpus.documents.len().div_ceil(threads);
            std::thread::scope(|scope| {
                for (t, docs) in corpus.documents.chunks(chunk.max(1)).enumerate() {
                    let trainer = &trainer;
                    let shared_in = &shared_in;
                    let shared_out = &shared_out;
                    scope.spawn(move || {
                        let mut rng = seeded(derive_seed(seed, &format!("sgns/{epoch}/{t}")));
                        // SAFETY: lock-free SGD; racing writes only perturb updates.
                        let (input, output) = unsafe { (shared_in.get(), shared_out.get()) };
                        trainer.run_docs(docs, input, output, &mut rng, base, threads as u64);
                    });
                }
            });
            input = shared_in.0.into_inner();
            output = shared_out.0.into_inner();
        }
    }

    let model = EmbeddingModel {
        vocabulary: corpus.vocabulary.clone(),
        dim,
        window: cfg.window,
        negatives: cfg.negatives,
        input,
        output,
    };
    if !model.is_finite() {
        return Err(Error::Numerical(
            "embedding training diverged; lower the learning rate".into(),
        ));
    }
    Ok(model)
}
