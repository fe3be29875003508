//! Train skip-gram embeddings on the bundled corpus and expand a keyword set
//! with nearest neighbors.
//!
//! ```text
//! cargo run --release --example word_embeddings
//! ```

use topicmap::corpus::{
    build_tokenized_corpus, expand_vocabulary, ingest_documents, normalize_keywords,
    train_embeddings, EmbeddingConfig, FilterConfig,
};

fn main() -> topicmap::Result<()> {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_corpus.jsonl");
    let (docs, _) = ingest_documents(&path)?;
    let filter = FilterConfig::default();
    let corpus = build_tokenized_corpus(&docs, &filter)?;

    let cfg = EmbeddingConfig {
        dim: 48,
        epochs: 5,
        ..EmbeddingConfig::default()
    };
    let model = train_embeddings(&corpus, &cfg, 11)?;

    // Each document's first keyword, deduplicated: one seed word per planted topic.
    let keywords = normalize_keywords(
        docs.iter().take(4).map(|d| d.keywords[0].as_str()),
        &filter,
    );
    for kw in &keywords {
        let w = model.vocabulary.lookup(kw).expect("keyword is in the corpus");
        let near: Vec<String> = model
            .nearest(w, 5)
            .into_iter()
            .map(|(j, c)| format!("{} ({c:.2})", model.vocabulary.word(j)))
            .collect();
        println!("{kw:>12}: {}", near.join(", "));
    }

    let (vocab, report) = expand_vocabulary(&model, &keywords, 10);
    println!(
        "{} keywords found, expanded vocabulary has {} words",
        report.keywords_found,
        vocab.len()
    );
    Ok(())
}
