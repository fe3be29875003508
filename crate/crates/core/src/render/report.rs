use std::fmt::Write as _;
use std::path::Path;

use crate::btm::{list_top_words, TopicDistribution, TopicWordMatrix};
use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// 1-based topic number.
    pub topic: usize,
    /// 1-based position within the topic's list.
    pub rank: usize,
    pub word: String,
    pub probability: f64,
}

/// Top words of every topic together with corpus-level topic proportions.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicReport {
    pub k: usize,
    pub theta: Vec<f64>,
    pub rows: Vec<ReportRow>,
}

pub fn render_report(x: &TopicWordMatrix, theta: &TopicDistribution, k: usize) -> Result<TopicReport> {
    if theta.theta.len() != x.n_topics() {
        return Err(Error::Shape(format!(
            "{} topic proportions for {} topics",
            theta.theta.len(),
            x.n_topics()
        )));
    }
    let top = list_top_words(x, k)?;
    let rows = top
        .into_iter()
        .enumerate()
        .flat_map(|(z, words)| {
            words
                .into_iter()
                .enumerate()
                .map(move |(r, (word, probability))| ReportRow {
                    topic: z + 1,
                    rank: r + 1,
                    word,
                    probability,
                })
        })
        .collect();
    Ok(TopicReport {
        k,
        theta: theta.theta.clone(),
        rows,
    })
}

impl TopicReport {
    /// CSV `topic,theta,rank,word,probability`, P·k rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let header = ["topic", "theta", "rank", "word", "probability"].map(String::from);
        io::write_csv(
            path,
            &header,
            self.rows.iter().map(|r| {
                [
                    r.topic.to_string(),
                    io::fmt_f64(self.theta[r.topic - 1]),
                    r.rank.to_string(),
                    r.word.clone(),
                    io::fmt_f64(r.probability),
                ]
            }),
        )
    }

    /// Plain-text summary: one block per topic, topics ordered by θ.
    pub fn to_text(&self) -> String {
        let mut order: Vec<usize> = (0..self.theta.len()).collect();
        order.sort_by(|&a, &b| self.theta[b].total_cmp(&self.theta[a]).then(a.cmp(&b)));
        let mut out = String::new();
        for z in order {
            let _ = writeln!(out, "topic {} (theta = {:.4})", z + 1, self.theta[z]);
            let words: Vec<String> = self
                .rows
                .iter()
                .filter(|r| r.topic == z + 1)
                .map(|r| format!("{} {:.4}", r.word, r.probability))
                .collect();
            for chunk in words.chunks(6) {
                let _ = writeln!(out, "  {}", chunk.join(", "));
            }
            out.push('\n');
        }
        out
    }
}
