//! Score words by coefficient of variation and maximum probability, then
//! build the nested sequence of selected-word matrices.
//!
//! ```text
//! cargo run --example word_selection
//! ```

use nalgebra::DMatrix;
use rand_distr::{Distribution, Gamma};
use topicmap::btm::TopicWordMatrix;
use topicmap::rng::seeded;
use topicmap::wordselect::{
    generate_matrix_sequence, logprob_histogram, row_statistics, SelectionConfig,
};

fn main() -> topicmap::Result<()> {
    // Dirichlet-distributed topic columns over 400 words.
    let (m, k) = (400, 20);
    let gamma = Gamma::new(0.1, 1.0).unwrap();
    let mut rng = seeded(3);
    let mut values = DMatrix::from_fn(m, k, |_, _| gamma.sample(&mut rng) + 1e-9);
    for mut col in values.column_iter_mut() {
        let s = col.sum();
        col /= s;
    }
    let words = (0..m).map(|w| format!("w{w:03}")).collect();
    let x = TopicWordMatrix::new(words, values)?;

    let scores = row_statistics(&x)?;
    for s in scores.iter().take(3) {
        println!("{:?}", s);
    }

    let seq = generate_matrix_sequence(&x, &SelectionConfig::default())?;
    for (level, mat) in seq.levels.iter().zip(&seq.matrices) {
        println!("{level}%: {} words x {} topics", mat.n_words(), mat.n_topics());
    }

    let hists = logprob_histogram(&x, 20, -11.0)?;
    println!(
        "topic 1: {} of {} words above ln p = -11",
        hists[0].above_cutoff, m
    );
    Ok(())
}
