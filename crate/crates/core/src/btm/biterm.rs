use std::collections::BTreeMap;

use log::warn;

use crate::corpus::{TokenizedCorpus, Vocabulary};
use crate::error::{Error, Result};

/// Unordered pair of distinct words, stored with `word_a < word_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Biterm {
    pub word_a: usize,
    pub word_b: usize,
    pub multiplicity: usize,
}

impl Biterm {
    pub fn new(w1: usize, w2: usize, multiplicity: usize) -> Self {
        let (word_a, word_b) = if w1 <= w2 { (w1, w2) } else { (w2, w1) };
        Self {
            word_a,
            word_b,
            multiplicity,
        }
    }
}

/// Biterms grouped by source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitermSet {
    pub vocabulary: Vocabulary,
    pub documents: Vec<Vec<Biterm>>,
}

impl BitermSet {
    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    /// Total biterm instances, |B|.
    pub fn total(&self) -> usize {
        self.documents
            .iter()
            .flatten()
            .map(|b| b.multiplicity)
            .sum()
    }

    /// One `(word_a, word_b)` entry per biterm instance, in document order.
    pub fn instances(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.total());
        for b in self.documents.iter().flatten() {
            for _ in 0..b.multiplicity {
                out.push((b.word_a, b.word_b));
            }
        }
        out
    }

    /// Build directly from instance pairs over a vocabulary of `m` placeholder words.
    pub fn from_pairs(m: usize, pairs: &[(usize, usize)]) -> Self {
        let vocabulary = Vocabulary::from_tokens((0..m).map(|i| format!("w{i}")));
        let documents = vec![pairs.iter().map(|&(a, b)| Biterm::new(a, b, 1)).collect()];
        Self {
            vocabulary,
            documents,
        }
    }
}

/// All within-document position pairs `i < j` with distinct words, aggregated
/// per document. `token_cap` truncates pathologically long documents.
pub fn extract_biterms(corpus: &TokenizedCorpus, token_cap: Option<usize>) -> Result<BitermSet> {
    if corpus.documents.is_empty() {
        return Err(Error::Input("corpus is empty".into()));
    }
    let mut documents = Vec::with_capacity(corpus.documents.len());
    let mut barren = 0usize;
    for doc in &corpus.documents {
        let tokens = match token_cap {
            Some(cap) => &doc[..doc.len().min(cap)],
            None => &doc[..],
        };
        let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, &wi) in tokens.iter().enumerate() {
            for &wj in &tokens[i + 1..] {
                if wi != wj {
                    *pairs.entry((wi.min(wj), wi.max(wj))).or_default() += 1;
                }
            }
        }
        if pairs.is_empty() {
            barren += 1;
        }
        documents.push(
            pairs
                .into_iter()
                .map(|((a, b), n)| Biterm::new(a, b, n))
                .collect(),
        );
    }
    if barren > 0 {
        warn!("{barren} documents have fewer than two distinct tokens and contribute no biterms");
    }
    let set = BitermSet {
        vocabulary: corpus.vocabulary.clone(),
        documents,
    };
    if set.total() == 0 {
        return Err(Error::Input("corpus yields zero biterms".into()));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(docs: &[&[&str]]) -> TokenizedCorpus {
        TokenizedCorpus::from_token_lists(
            docs.iter()
                .enumerate()
                .map(|(i, d)| (i.to_string(), d.to_vec())),
        )
        .unwrap()
    }

    #[test]
    fn three_words_give_three_pairs() {
        let c = corpus(&[&["a", "b", "c"]]);
        let set = extract_biterms(&c, None).unwrap();
        assert_eq!(
            set.documents[0],
            vec![Biterm::new(0, 1, 1), Biterm::new(0, 2, 1), Biterm::new(1, 2, 1)]
        );
    }

    #[test]
    fn single_word_document_gives_nothing() {
        let c = corpus(&[&["a"], &["a", "b"]]);
        let set = extract_biterms(&c, None).unwrap();
        assert!(set.documents[0].is_empty());
        assert_eq!(set.total(), 1);
    }

    #[test]
    fn repeated_word_aggregates_and_skips_self_pairs() {
        let c = corpus(&[&["a", "a", "b"]]);
        let set = extract_biterms(&c, None).unwrap();
        assert_eq!(set.documents[0], vec![Biterm::new(0, 1, 2)]);
        assert_eq!(set.instances(), vec![(0, 1), (0, 1)]);
    }

    #[test]
    fn no_biterms_anywhere_is_fatal() {
        let c = corpus(&[&["a"], &["b", "b"]]);
        assert!(extract_biterms(&c, None).is_err());
    }

    #[test]
    fn token_cap_truncates() {
        let c = corpus(&[&["a", "b", "c", "d"]]);
        let set = extract_biterms(&c, Some(2)).unwrap();
        assert_eq!(set.total(), 1);
    }

    #[test]
    fn canonical_order() {
        let b = Biterm::new(5, 2, 1);
        assert_eq!((b.word_a, b.word_b), (2, 5));
    }
}
