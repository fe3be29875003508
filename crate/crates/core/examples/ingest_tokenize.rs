//! Read a JSONL corpus, apply the noise filters and print vocabulary stats.
//!
//! ```text
//! cargo run --example ingest_tokenize -- [corpus.jsonl]
//! ```

use std::path::PathBuf;

use topicmap::corpus::{build_tokenized_corpus, ingest_documents, FilterConfig};

fn main() -> topicmap::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/synthetic_corpus.jsonl")
    });
    let (docs, report) = ingest_documents(&path)?;
    println!(
        "{} lines read, {} documents kept, {} dropped",
        report.lines_read,
        docs.len(),
        report.dropped()
    );

    let filter = FilterConfig::default().with_stoplist(["background"]);
    for raw in ["Virus p.001 ie l.", "H1N1 cases rose in 2009", "n1427 spike-protein"] {
        let kept: Vec<String> = filter.tokenize(raw).collect();
        println!("{raw:?} -> {kept:?}");
    }

    let corpus = build_tokenized_corpus(&docs, &filter)?;
    println!(
        "{} documents, {} tokens, {} distinct words",
        corpus.num_documents(),
        corpus.num_tokens(),
        corpus.vocab_size()
    );
    let first: Vec<&str> = corpus.doc_tokens(0).take(12).collect();
    println!("first document starts: {}", first.join(" "));
    Ok(())
}
