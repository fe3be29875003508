//! Seeded synthetic data: a short-text corpus with planted topics, and
//! response matrices drawn from the Gaussian LSIRM.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::corpus::{Document, DocumentSet};
use crate::lsirm::LsirmState;
use crate::rng::{derive_seed, seeded, Rng};

const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st", "tr",
    "pl", "gr",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou"];
const CODAS: &[&str] = &["", "", "n", "r", "s", "l", "x"];

/// Pronounceable pseudo-words, distinct and sorted by generation order.
pub fn pseudo_words(count: usize, seed: u64) -> Vec<String> {
    let mut rng = seeded(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(&mut rng).unwrap());
            w.push_str(VOWELS.choose(&mut rng).unwrap());
        }
        w.push_str(CODAS.choose(&mut rng).unwrap());
        if !crate::corpus::DEFAULT_NOISE_WORDS.contains(&w.as_str()) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpusConfig {
    pub documents: usize,
    pub topics: usize,
    pub words_per_topic: usize,
    pub background_words: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Share of a document's tokens drawn from its main topic.
    pub main_share: f64,
    /// Share drawn from a second topic (the rest is background).
    pub second_share: f64,
    pub keywords_per_doc: usize,
    /// Chance that a document carries noise tokens such as `p.05` or `ie`.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticCorpusConfig {
    fn default() -> Self {
        Self {
            documents: 200,
            topics: 20,
            words_per_topic: 12,
            background_words: 40,
            min_len: 25,
            max_len: 40,
            main_share: 0.75,
            second_share: 0.15,
            keywords_per_doc: 3,
            noise_rate: 0.3,
            seed: 2021,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub documents: DocumentSet,
    /// Planted topic vocabularies, most probable word first.
    pub topic_words: Vec<Vec<String>>,
    pub background: Vec<String>,
}

const NOISE: &[&str] = &["p.05", "p.001", "ie", "e.g.", "l.", "2020", "n1427", "x"];

/// Documents whose abstracts mix one main topic, one secondary topic and
/// background words. Topic word frequencies follow a Zipf-like decay.
pub fn synthetic_corpus(cfg: &SyntheticCorpusConfig) -> SyntheticCorpus {
    let total = cfg.topics * cfg.words_per_topic + cfg.background_words;
    let words = pseudo_words(total, derive_seed(cfg.seed, "words"));
    let topic_words: Vec<Vec<String>> = (0..cfg.topics)
        .map(|t| words[t * cfg.words_per_topic..(t + 1) * cfg.words_per_topic].to_vec())
        .collect();
    let background = words[cfg.topics * cfg.words_per_topic..].to_vec();
    let zipf = WeightedIndex::new((1..=cfg.words_per_topic).map(|r| 1.0 / r as f64))
        .expect("positive weights");

    let mut rng = seeded(derive_seed(cfg.seed, "documents"));
    let mut documents = Vec::with_capacity(cfg.documents);
    for d in 0..cfg.documents {
        let main = d % cfg.topics;
        let second = (main + rng.random_range(1..cfg.topics)) % cfg.topics;
        let len = rng.random_range(cfg.min_len..=cfg.max_len);
        let mut tokens: Vec<String> = (0..len)
            .map(|_| {
                let u: f64 = rng.random();
                if u < cfg.main_share {
                    topic_words[main][zipf.sample(&mut rng)].clone()
                } else if u < cfg.main_share + cfg.second_share {
                    topic_words[second][zipf.sample(&mut rng)].clone()
                } else {
                    background.choose(&mut rng).unwrap().clone()
                }
            })
            .collect();
        if rng.random::<f64>() < cfg.noise_rate {
            let at = rng.random_range(0..tokens.len());
            tokens.insert(at, NOISE.choose(&mut rng).unwrap().to_string());
        }
        let mut text = String::new();
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                text.push_str(if i % 9 == 0 { ", " } else { " " });
            }
            text.push_str(t);
        }
        text.push('.');

        let mut keywords: Vec<String> = Vec::new();
        let pool = cfg.words_per_topic.min(5);
        while keywords.len() < cfg.keywords_per_doc.min(pool) {
            let w = &topic_words[main][rng.random_range(0..pool)];
            if !keywords.contains(w) {
                keywords.push(w.clone());
            }
        }
        let title = format!(
            "On {} and {}",
            topic_words[main][0], topic_words[second][0]
        );
        documents.push(Document {
            id: format!("doc{:04}", d + 1),
            title,
            r#abstract: text,
            keywords,
        });
    }
    SyntheticCorpus {
        documents: DocumentSet { documents },
        topic_words,
        background,
    }
}

/// Draw a parameter set and an N x P response matrix from the Gaussian LSIRM
/// with noise sd `sigma`. Effects and positions are standard normal.
pub fn lsirm_data(n: usize, p: usize, d: usize, sigma: f64, seed: u64) -> (DMatrix<f64>, LsirmState) {
    let mut rng: Rng = seeded(seed);
    let mut z = || -> f64 { rng.sample(StandardNormal) };
    let theta: Vec<f64> = (0..n).map(|_| z()).collect();
    let beta: Vec<f64> = (0..p).map(|_| z()).collect();
    let u = DMatrix::from_fn(n, d, |_, _| z());
    let v = DMatrix::from_fn(p, d, |_, _| z());
    let truth = LsirmState {
        theta,
        beta,
        u,
        v,
        sigma2: sigma * sigma,
        sigma2_theta: 1.0,
    };
    let noise = Normal::new(0.0, sigma).expect("sigma must be positive");
    let mut rng = seeded(derive_seed(seed, "noise"));
    let x = DMatrix::from_fn(n, p, |j, i| truth.mean(j, i) + noise.sample(&mut rng));
    (x, truth)
}
