use std::path::Path;

use nalgebra::DMatrix;

use super::gibbs::{BtmConfig, GibbsCounts};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::io;

/// Word-given-topic probabilities: rows are words, columns are topics.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicWordMatrix {
    pub words: Vec<String>,
    pub values: DMatrix<f64>,
}

impl TopicWordMatrix {
    pub fn new(words: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if words.len() != values.nrows() {
            return Err(Error::Shape(format!(
                "{} row labels for {} rows",
                words.len(),
                values.nrows()
            )));
        }
        Ok(Self { words, values })
    }

    pub fn n_words(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_topics(&self) -> usize {
        self.values.ncols()
    }

    /// Keep the given rows, in the given order. Entry values are copied untouched.
    pub fn restrict_rows(&self, rows: &[usize]) -> Self {
        let words = rows.iter().map(|&r| self.words[r].clone()).collect();
        let values = self.values.select_rows(rows);
        Self { words, values }
    }

    /// CSV with header `word,topic_1..topic_K`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_labeled_matrix(path, "word", "topic_", &self.words, &self.values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let (words, values) = io::read_labeled_matrix(path)?;
        Self::new(words, values)
    }
}

/// Corpus-level topic proportions.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicDistribution {
    pub theta: Vec<f64>,
}

impl TopicDistribution {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        io::write_csv(
            path,
            &["theta".to_string()],
            self.theta.iter().map(|v| [io::fmt_f64(*v)]),
        )
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let (_, rows) = io::read_csv(path)?;
        let theta = rows
            .iter()
            .map(|r| io::parse_f64(&r[0], path))
            .collect::<Result<_>>()?;
        Ok(Self { theta })
    }
}

/// Point estimates of φ and θ from one set of counts:
///
/// ```text
/// φ_{w|z} = (n_{w|z} + β) / (Σ_w n_{w|z} + Mβ)
/// θ_z     = (n_z + α) / (|B| + Kα)
/// ```
pub fn estimate_distributions(
    counts: &GibbsCounts,
    vocabulary: &Vocabulary,
    cfg: &BtmConfig,
) -> (TopicWordMatrix, TopicDistribution) {
    let m = counts.vocab_size;
    let k = counts.topics;
    let m_beta = m as f64 * cfg.beta;
    let denom: Vec<f64> = counts
        .n_w_total
        .iter()
        .map(|&n| n as f64 + m_beta)
        .collect();
    let values = DMatrix::from_fn(m, k, |w, z| {
        (counts.word_topic(w, z) as f64 + cfg.beta) / denom[z]
    });
    let total = counts.total_biterms() as f64;
    let theta = counts
        .n_z
        .iter()
        .map(|&n| (n as f64 + cfg.alpha) / (total + k as f64 * cfg.alpha))
        .collect();

    let words = if vocabulary.len() == m {
        vocabulary.tokens().to_vec()
    } else {
        (0..m).map(|w| format!("w{w}")).collect()
    };
    (
        TopicWordMatrix { words, values },
        TopicDistribution { theta },
    )
}

/// Top `k` words of every topic, by decreasing probability; ties go to the
/// lower row index.
pub fn list_top_words(x: &TopicWordMatrix, k: usize) -> Result<Vec<Vec<(String, f64)>>> {
    if k == 0 || k > x.n_words() {
        return Err(Error::Input(format!(
            "top-word count {k} outside 1..={}",
            x.n_words()
        )));
    }
    Ok((0..x.n_topics())
        .map(|z| {
            let col = x.values.column(z);
            let mut order: Vec<usize> = (0..x.n_words()).collect();
            order.sort_by(|&a, &b| col[b].total_cmp(&col[a]).then(a.cmp(&b)));
            order
                .into_iter()
                .take(k)
                .map(|w| (x.words[w].clone(), col[w]))
                .collect()
        })
        .collect())
}
