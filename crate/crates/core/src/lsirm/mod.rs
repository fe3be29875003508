//! Gaussian latent space item response model and its MCMC fit.

mod model;
mod positions;
mod sampler;

pub use model::{
    log_posterior, log_prior, lsirm_log_likelihood, AlignmentReference, LsirmConfig, LsirmState,
};
pub use positions::{extract_positions, reference_index, PositionMatrix};
pub use sampler::{
    metropolis_accept, run_lsirm_mcmc, sample_inverse_gamma, sample_variance, AcceptanceSummary,
    BlockAcceptance, LsirmChain, LsirmSample,
};
