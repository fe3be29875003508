use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::document::DocumentSet;
use crate::error::{Error, Result};

/// Abbreviations and function words dropped before anything else.
pub const DEFAULT_NOISE_WORDS: &[&str] = &[
    "ie", "eg", "al", "etc", "vs", "viz", "cf", "the", "of", "and", "or", "in", "on", "to", "for",
    "with", "by", "as", "at", "an", "is", "are", "was", "were", "be", "been", "this", "that",
    "these", "those", "it", "its", "we", "our", "from", "which", "not", "no", "but", "than", "also",
    "has", "have", "had", "can", "may", "using", "use", "used", "based", "between", "among",
    "into", "during", "after", "before", "all", "both", "such", "there", "their", "they", "other",
];

/// Noise rules applied to every token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    pub min_token_chars: usize,
    pub drop_numerals: bool,
    /// Tokens that mix digits with at most two letters, such as `n1427` or `p05`.
    pub drop_numeral_codes: bool,
    pub use_default_noise_words: bool,
    pub stoplist: BTreeSet<String>,
    pub include_title: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            min_token_chars: 2,
            drop_numerals: true,
            drop_numeral_codes: true,
            use_default_noise_words: true,
            stoplist: BTreeSet::new(),
            include_title: false,
        }
    }
}

impl FilterConfig {
    pub fn with_stoplist<I, S>(mut self, words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.stoplist
            .extend(words.into_iter().map(|w| w.as_ref().to_lowercase()));
        self
    }

    /// Extend the stoplist from a file holding one token per line.
    pub fn load_stoplist(mut self, path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let word = line.trim();
            if !word.is_empty() && !word.starts_with('#') {
                self.stoplist.insert(word.to_lowercase());
            }
        }
        Ok(self)
    }

    pub fn keeps(&self, token: &str) -> bool {
        if token.chars().count() < self.min_token_chars {
            return false;
        }
        let digits = token.chars().filter(char::is_ascii_digit).count();
        if self.drop_numerals && token.chars().all(|c| c.is_numeric()) {
            return false;
        }
        if self.drop_numeral_codes && digits > 0 {
            let letters = token.chars().filter(|c| c.is_alphabetic()).count();
            if letters <= 2 {
                return false;
            }
        }
        if self.use_default_noise_words && DEFAULT_NOISE_WORDS.contains(&token) {
            return false;
        }
        !self.stoplist.contains(token)
    }

    /// Split on non-alphanumerics, lowercase, and apply the noise rules.
    pub fn tokenize<'a>(&'a self, text: &'a str) -> impl Iterator<Item = String> + 'a {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(str::to_lowercase)
            .filter(move |t| self.keeps(t))
    }
}

/// Ordered set of distinct words; a word's index is its position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from tokens in order, collapsing duplicates to their first position.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::new();
        for token in tokens {
            vocab.insert(token.into());
        }
        vocab
    }

    pub fn insert(&mut self, token: String) -> usize {
        if let Some(&idx) = self.index.get(&token) {
            return idx;
        }
        let idx = self.tokens.len();
        self.index.insert(token.clone(), idx);
        self.tokens.push(token);
        idx
    }

    pub fn lookup(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn word(&self, idx: usize) -> &str {
        &self.tokens[idx]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// One token per line, line order = index order.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for token in &self.tokens {
            writeln!(out, "{token}").map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut vocab = Self::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if !line.is_empty() {
                vocab.insert(line);
            }
        }
        Ok(vocab)
    }
}

/// Documents as sequences of vocabulary indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedCorpus {
    pub ids: Vec<String>,
    pub documents: Vec<Vec<usize>>,
    pub vocabulary: Vocabulary,
}

impl TokenizedCorpus {
    /// Build from already tokenized documents; empty documents are dropped.
    pub fn from_token_lists<I, D, S>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, D)>,
        D: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocabulary = Vocabulary::new();
        let mut ids = Vec::new();
        let mut documents = Vec::new();
        for (id, tokens) in docs {
            let doc: Vec<usize> = tokens
                .into_iter()
                .map(|t| vocabulary.insert(t.into()))
                .collect();
            if !doc.is_empty() {
                ids.push(id);
                documents.push(doc);
            }
        }
        if documents.is_empty() {
            return Err(Error::Input("corpus has no non-empty documents".into()));
        }
        Ok(Self {
            ids,
            documents,
            vocabulary,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn num_documents(&self) -> usize {
        self.documents.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }

    pub fn doc_tokens(&self, d: usize) -> impl Iterator<Item = &str> {
        self.documents[d]
            .iter()
            .map(move |&w| self.vocabulary.word(w))
    }

    /// Occurrence count per vocabulary index.
    pub fn unigram_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.vocab_size()];
        for doc in &self.documents {
            for &w in doc {
                counts[w] += 1;
            }
        }
        counts
    }

    /// Keep only tokens in `vocab`, re-indexing against it. Documents that
    /// become empty are dropped.
    pub fn restrict_to(&self, vocab: &Vocabulary) -> Result<Self> {
        let mut ids = Vec::new();
        let mut documents = Vec::new();
        for (d, doc) in self.documents.iter().enumerate() {
            let kept: Vec<usize> = doc
                .iter()
                .filter_map(|&w| vocab.lookup(self.vocabulary.word(w)))
                .collect();
            if !kept.is_empty() {
                ids.push(self.ids[d].clone());
                documents.push(kept);
            }
        }
        if documents.is_empty() {
            return Err(Error::Input(
                "no document retains a token of the restricted vocabulary".into(),
            ));
        }
        Ok(Self {
            ids,
            documents,
            vocabulary: vocab.clone(),
        })
    }

    /// One document per line: `id<TAB>token token ...`.
    pub fn write(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for (d, id) in self.ids.iter().enumerate() {
            let text: Vec<&str> = self.doc_tokens(d).collect();
            writeln!(out, "{id}\t{}", text.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))
    }

    /// Read a corpus written by [`TokenizedCorpus::write`] against a fixed vocabulary.
    pub fn read(path: &Path, vocabulary: Vocabulary) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut ids = Vec::new();
        let mut documents = Vec::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let (id, text) = line.split_once('\t').ok_or_else(|| {
                Error::Input(format!("{}:{}: missing tab separator", path.display(), n + 1))
            })?;
            let doc = text
                .split_whitespace()
                .map(|t| {
                    vocabulary.lookup(t).ok_or_else(|| {
                        Error::Input(format!(
                            "{}:{}: token `{t}` not in vocabulary",
                            path.display(),
                            n + 1
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if !doc.is_empty() {
                ids.push(id.to_string());
                documents.push(doc);
            }
        }
        if documents.is_empty() {
            return Err(Error::Input(format!("{} holds no documents", path.display())));
        }
        Ok(Self {
            ids,
            documents,
            vocabulary,
        })
    }
}

/// Tokenize every abstract (and optionally title), applying the noise filter.
pub fn build_tokenized_corpus(docs: &DocumentSet, filter: &FilterConfig) -> Result<TokenizedCorpus> {
    if docs.is_empty() {
        return Err(Error::Input("document set is empty".into()));
    }
    let lists = docs.iter().map(|doc| {
        let mut tokens: Vec<String> = Vec::new();
        if filter.include_title {
            tokens.extend(filter.tokenize(&doc.title));
        }
        tokens.extend(filter.tokenize(&doc.r#abstract));
        (doc.id.clone(), tokens)
    });
    TokenizedCorpus::from_token_lists(lists).map_err(|_| {
        Error::Input(format!(
            "all {} documents were emptied by token filtering; check the stoplist and noise rules",
            docs.len()
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::document::Document;
    use proptest::prelude::*;

    fn doc(id: &str, text: &str) -> Document {
        Document {
            id: id.into(),
            title: String::new(),
            r#abstract: text.into(),
            keywords: vec![],
        }
    }

    fn tokens(filter: &FilterConfig, text: &str) -> Vec<String> {
        filter.tokenize(text).collect()
    }

    #[test]
    fn noise_tokens_are_removed() {
        let filter = FilterConfig::default();
        assert_eq!(tokens(&filter, "virus p.001 ie l."), vec!["virus"]);
        assert_eq!(tokens(&filter, "p.05 n1427 2020 covid19"), vec!["covid19"]);
    }

    #[test]
    fn case_folding_merges_occurrences() {
        let set = DocumentSet {
            documents: vec![doc("1", "Virus VIRUS virus")],
        };
        let corpus = build_tokenized_corpus(&set, &FilterConfig::default()).unwrap();
        assert_eq!(corpus.vocab_size(), 1);
        assert_eq!(corpus.documents[0], vec![0, 0, 0]);
    }

    #[test]
    fn stoplist_removes_common_words() {
        let filter = FilterConfig::default().with_stoplist(["data"]);
        assert_eq!(tokens(&filter, "data virus Data"), vec!["virus"]);
    }

    #[test]
    fn emptied_documents_are_dropped() {
        let set = DocumentSet {
            documents: vec![doc("1", "virus"), doc("2", "ie 42")],
        };
        let corpus = build_tokenized_corpus(&set, &FilterConfig::default()).unwrap();
        assert_eq!(corpus.ids, vec!["1".to_string()]);
    }

    #[test]
    fn all_documents_emptied_is_fatal() {
        let set = DocumentSet {
            documents: vec![doc("1", "a b 3"), doc("2", "ie")],
        };
        let err = build_tokenized_corpus(&set, &FilterConfig::default()).unwrap_err();
        assert!(err.to_string().contains("emptied"));
    }

    #[test]
    fn restrict_reindexes() {
        let set = DocumentSet {
            documents: vec![doc("1", "virus vaccine mask"), doc("2", "mask")],
        };
        let corpus = build_tokenized_corpus(&set, &FilterConfig::default()).unwrap();
        let vocab = Vocabulary::from_tokens(["vaccine", "virus"]);
        let restricted = corpus.restrict_to(&vocab).unwrap();
        assert_eq!(restricted.documents, vec![vec![1, 0]]);
        assert_eq!(restricted.ids, vec!["1".to_string()]);
    }

    #[test]
    fn corpus_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let set = DocumentSet {
            documents: vec![doc("x", "virus vaccine"), doc("y", "mask virus")],
        };
        let corpus = build_tokenized_corpus(&set, &FilterConfig::default()).unwrap();
        let vpath = dir.path().join("vocab.txt");
        let cpath = dir.path().join("corpus.tsv");
        corpus.vocabulary.write(&vpath).unwrap();
        corpus.write(&cpath).unwrap();
        let back = TokenizedCorpus::read(&cpath, Vocabulary::read(&vpath).unwrap()).unwrap();
        assert_eq!(back, corpus);
    }

    proptest! {
        #[test]
        fn tokenization_is_idempotent(text in "[ -~]{0,120}") {
            let filter = FilterConfig::default();
            let first = tokens(&filter, &text);
            let again = tokens(&filter, &first.join(" "));
            prop_assert_eq!(first, again);
        }

        #[test]
        fn vocabulary_round_trip(words in proptest::collection::vec("[a-z]{1,6}", 0..40)) {
            let vocab = Vocabulary::from_tokens(words);
            for i in 0..vocab.len() {
                prop_assert_eq!(vocab.lookup(vocab.word(i)), Some(i));
            }
        }
    }
}
