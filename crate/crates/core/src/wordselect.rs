//! Discriminative word selection.
//!
//! Each word (row of the topic-word matrix) is scored by its coefficient of
//! variation across topics and by its largest topic probability. Both scores
//! are turned into percentile ranks; a word's combined rank is the smaller of
//! the two, so only words strong on both criteria survive high thresholds.
//! Thresholding one shared ranking makes the selections nested.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::btm::TopicWordMatrix;
use crate::error::{Error, Result};
use crate::io::{self, fmt_f64};

#[derive(Debug, Clone, PartialEq)]
pub struct WordScore {
    /// Row index into the scored matrix.
    pub word: usize,
    pub cv: f64,
    pub max_prob: f64,
    /// 1-based position of the word when sorted by ascending cv.
    pub cv_rank: usize,
    /// 1-based position of the word when sorted by ascending max_prob.
    pub max_rank: usize,
    /// min(cv_rank, max_rank) / N.
    pub combined_rank: f64,
}

/// Percentile-rank positions of `values`. Ties: the lower index ranks higher.
fn rank_positions(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a)));
    let mut ranks = vec![0; values.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos + 1;
    }
    ranks
}

/// Coefficient of variation (population sd over mean) and maximum of one row.
pub fn row_cv_max(row: impl Iterator<Item = f64> + Clone) -> Option<(f64, f64)> {
    let n = row.clone().count() as f64;
    let mean = row.clone().sum::<f64>() / n;
    if !(mean > 0.0) {
        return None;
    }
    let max = row.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = row.clone().fold(f64::INFINITY, f64::min);
    if max == min {
        return Some((0.0, max));
    }
    let var = row.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Some((var.sqrt() / mean, max))
}

pub fn row_statistics(x: &TopicWordMatrix) -> Result<Vec<WordScore>> {
    let n = x.n_words();
    if n == 0 || x.n_topics() == 0 {
        return Err(Error::Input("topic-word matrix is empty".into()));
    }
    let mut cvs = Vec::with_capacity(n);
    let mut maxes = Vec::with_capacity(n);
    for r in 0..n {
        let (cv, max) = row_cv_max(x.values.row(r).iter().copied()).ok_or_else(|| {
            Error::Numerical(format!("row `{}` has non-positive mean", x.words[r]))
        })?;
        cvs.push(cv);
        maxes.push(max);
    }
    let cv_ranks = rank_positions(&cvs);
    let max_ranks = rank_positions(&maxes);
    Ok((0..n)
        .map(|w| WordScore {
            word: w,
            cv: cvs[w],
            max_prob: maxes[w],
            cv_rank: cv_ranks[w],
            max_rank: max_ranks[w],
            combined_rank: cv_ranks[w].min(max_ranks[w]) as f64 / n as f64,
        })
        .collect())
}

/// Words whose combined rank lies strictly above `1 - p/100`, in row order.
pub fn select_top_words(scores: &[WordScore], percent: f64) -> Result<Vec<usize>> {
    if !(percent > 0.0 && percent <= 100.0) {
        return Err(Error::Input(format!("percentage {percent} outside (0, 100]")));
    }
    let n = scores.len() as f64;
    // rank/N > 1 - p/100  <=>  100·rank > N·(100 - p), exact for integral p
    let selected: Vec<usize> = scores
        .iter()
        .filter(|s| {
            let rank = s.cv_rank.min(s.max_rank) as f64;
            100.0 * rank > n * (100.0 - percent)
        })
        .map(|s| s.word)
        .collect();
    if selected.is_empty() {
        return Err(Error::Input(format!("no word selected at {percent}%")));
    }
    Ok(selected)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub from_percent: u32,
    pub to_percent: u32,
    pub step: u32,
    pub histogram_bins: usize,
    pub log_cutoff: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            from_percent: 60,
            to_percent: 40,
            step: 1,
            histogram_bins: 30,
            log_cutoff: -11.0,
        }
    }
}

impl SelectionConfig {
    pub fn levels(&self) -> Result<Vec<u32>> {
        if self.from_percent <= self.to_percent || self.step == 0 || self.from_percent > 100 {
            return Err(Error::Config(format!(
                "invalid level range {}..{} step {}",
                self.from_percent, self.to_percent, self.step
            )));
        }
        Ok((self.to_percent..=self.from_percent)
            .rev()
            .step_by(self.step as usize)
            .collect())
    }
}

/// Row-restricted copies of X, one per level, highest level first.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSequence {
    pub levels: Vec<u32>,
    pub matrices: Vec<TopicWordMatrix>,
}

pub fn generate_matrix_sequence(x: &TopicWordMatrix, cfg: &SelectionConfig) -> Result<MatrixSequence> {
    let levels = cfg.levels()?;
    let scores = row_statistics(x)?;
    let matrices = levels
        .iter()
        .map(|&level| {
            let rows = select_top_words(&scores, level as f64)?;
            Ok(x.restrict_rows(&rows))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MatrixSequence { levels, matrices })
}

/// Per-topic histogram of ln-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicHistogram {
    pub topic: usize,
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Rows whose ln-probability exceeds the cutoff.
    pub above_cutoff: usize,
}

pub fn logprob_histogram(x: &TopicWordMatrix, bins: usize, cutoff: f64) -> Result<Vec<TopicHistogram>> {
    if bins == 0 {
        return Err(Error::Input("histogram needs at least one bin".into()));
    }
    (0..x.n_topics())
        .map(|z| {
            let logs = x
                .values
                .column(z)
                .iter()
                .enumerate()
                .map(|(w, &p)| {
                    if p > 0.0 {
                        Ok(p.ln())
                    } else {
                        Err(Error::Numerical(format!(
                            "zero probability for `{}` in topic {}",
                            x.words[w],
                            z + 1
                        )))
                    }
                })
                .collect::<Result<Vec<f64>>>()?;
            let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let width = (hi - lo) / bins as f64;
            let edges: Vec<f64> = (0..=bins)
                .map(|i| if i == bins { hi } else { lo + width * i as f64 })
                .collect();
            let mut counts = vec![0; bins];
            for &v in &logs {
                let b = if width > 0.0 {
                    (((v - lo) / width) as usize).min(bins - 1)
                } else {
                    0
                };
                counts[b] += 1;
            }
            Ok(TopicHistogram {
                topic: z,
                edges,
                counts,
                above_cutoff: logs.iter().filter(|&&v| v > cutoff).count(),
            })
        })
        .collect()
}

/// CSV `word,cv,max_prob,combined_rank`.
pub fn write_scores(path: &Path, x: &TopicWordMatrix, scores: &[WordScore]) -> Result<()> {
    let header = ["word", "cv", "max_prob", "combined_rank"].map(String::from);
    io::write_csv(
        path,
        &header,
        scores.iter().map(|s| {
            [
                x.words[s.word].clone(),
                fmt_f64(s.cv),
                fmt_f64(s.max_prob),
                fmt_f64(s.combined_rank),
            ]
        }),
    )
}

/// CSV `topic,bin_left,bin_right,count` with 1-based topics.
pub fn write_histograms(path: &Path, hists: &[TopicHistogram]) -> Result<()> {
    let header = ["topic", "bin_left", "bin_right", "count"].map(String::from);
    let rows = hists.iter().flat_map(|h| {
        h.counts.iter().enumerate().map(move |(b, c)| {
            [
                (h.topic + 1).to_string(),
                fmt_f64(h.edges[b]),
                fmt_f64(h.edges[b + 1]),
                c.to_string(),
            ]
        })
    });
    io::write_csv(path, &header, rows)
}
