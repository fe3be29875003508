//! Corpus construction: ingestion, tokenization, embeddings, and keyword
//! vocabulary expansion.

mod document;
mod embedding;
mod expand;
mod tokenize;

pub use document::{ingest_documents, read_documents, Document, DocumentSet, IngestReport};
pub use embedding::{
    context_positions, cosine, pair_gradient, pair_loss, train_embeddings, EmbeddingConfig,
    EmbeddingModel, PairGradient,
};
pub use expand::{expand_vocabulary, ExpansionReport};
pub use tokenize::{
    build_tokenized_corpus, FilterConfig, TokenizedCorpus, Vocabulary, DEFAULT_NOISE_WORDS,
};

/// Normalize raw keyword strings with the corpus tokenizer, keeping first
/// occurrences in order.
pub fn normalize_keywords<'a, I>(keywords: I, filter: &FilterConfig) -> Vec<String>
where
    I: IntoIterator<Item = &'a str>,
{
    let mut seen = std::collections::HashSet::new();
    keywords
        .into_iter()
        .flat_map(|kw| filter.tokenize(kw).collect::<Vec<_>>())
        .filter(|t| seen.insert(t.clone()))
        .collect()
}
