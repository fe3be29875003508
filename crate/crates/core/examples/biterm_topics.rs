//! Fit the biterm topic model to a small planted-topic corpus and list the
//! top words of each recovered topic.
//!
//! ```text
//! cargo run --release --example biterm_topics
//! ```

use topicmap::btm::{extract_biterms, list_top_words, run_btm_gibbs, BtmConfig};
use topicmap::corpus::{build_tokenized_corpus, FilterConfig};
use topicmap::synthetic::{synthetic_corpus, SyntheticCorpusConfig};

fn main() -> topicmap::Result<()> {
    let planted = synthetic_corpus(&SyntheticCorpusConfig {
        documents: 300,
        topics: 4,
        words_per_topic: 8,
        background_words: 10,
        min_len: 8,
        max_len: 14,
        main_share: 0.85,
        second_share: 0.05,
        seed: 5,
        ..SyntheticCorpusConfig::default()
    });
    let corpus = build_tokenized_corpus(&planted.documents, &FilterConfig::default())?;
    let biterms = extract_biterms(&corpus, None)?;
    println!("{} biterm instances over {} words", biterms.total(), biterms.vocab_size());

    let cfg = BtmConfig {
        topics: 4,
        alpha: 1.0,
        beta: 0.01,
        burn_in: 200,
        iterations: 400,
        thin: 10,
        seed: 17,
        ..BtmConfig::default()
    };
    let fit = run_btm_gibbs(&biterms, &cfg)?;
    println!("averaged over {} retained sweeps", fit.retained);

    for (z, top) in list_top_words(&fit.phi, 5)?.iter().enumerate() {
        let words: Vec<&str> = top.iter().map(|(w, _)| w.as_str()).collect();
        println!("topic {} (theta {:.3}): {}", z + 1, fit.theta.theta[z], words.join(" "));
    }
    println!("planted:");
    for words in &planted.topic_words {
        println!("  {}", words[..5].join(" "));
    }
    Ok(())
}
