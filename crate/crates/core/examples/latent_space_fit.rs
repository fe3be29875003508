//! Simulate a word-by-topic matrix from the Gaussian latent space model, fit
//! it by MCMC and compare the recovered topic positions with the truth.
//!
//! ```text
//! cargo run --release --example latent_space_fit -- [iterations]
//! ```

use topicmap::align::{procrustes_fit, residual};
use topicmap::lsirm::{extract_positions, run_lsirm_mcmc, AlignmentReference, LsirmConfig};
use topicmap::synthetic::lsirm_data;

fn main() -> topicmap::Result<()> {
    let iterations: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("iterations must be an integer"))
        .unwrap_or(15_000);
    let (x, truth) = lsirm_data(200, 10, 2, 0.1, 42);

    let cfg = LsirmConfig {
        iterations,
        burn_in: iterations / 5,
        seed: 7,
        ..LsirmConfig::default()
    };
    let chain = run_lsirm_mcmc(&x, &cfg)?;
    let a = &chain.acceptance;
    println!(
        "{} samples kept; acceptance theta {:.2} beta {:.2} u {:.2} v {:.2}",
        chain.samples.len(),
        a.theta.rate(),
        a.beta.rate(),
        a.u.rate(),
        a.v.rate()
    );
    let last = chain.samples.last().unwrap();
    println!("final sigma^2 = {:.4} (truth 0.01)", last.sigma2);

    let est = extract_positions(&chain, 0, AlignmentReference::MaxPosterior)?;
    let (_, aligned) = procrustes_fit(&est.coords, &truth.v)?;
    let rmse = residual(&aligned, &truth.v) / (truth.v.len() as f64).sqrt();
    println!("topic position RMSE after alignment: {rmse:.4}");
    Ok(())
}
