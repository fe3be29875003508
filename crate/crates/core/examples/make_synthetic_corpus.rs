//! Write a seeded synthetic short-text corpus as JSONL.
//!
//! ```text
//! cargo run --example make_synthetic_corpus -- out.jsonl [documents] [seed]
//! ```

use std::path::PathBuf;

use topicmap::synthetic::{synthetic_corpus, SyntheticCorpusConfig};

fn main() -> topicmap::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| "synthetic_corpus.jsonl".into()));
    let mut cfg = SyntheticCorpusConfig::default();
    if let Some(n) = args.next() {
        cfg.documents = n.parse().expect("document count must be an integer");
    }
    if let Some(s) = args.next() {
        cfg.seed = s.parse().expect("seed must be an integer");
    }
    let corpus = synthetic_corpus(&cfg);
    corpus.documents.write_jsonl(&path)?;
    println!("wrote {} documents to {}", corpus.documents.len(), path.display());
    for (t, words) in corpus.topic_words.iter().enumerate() {
        println!("planted topic {:2}: {}", t + 1, words[..5].join(" "));
    }
    Ok(())
}
