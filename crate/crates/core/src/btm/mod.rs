//! Biterm topic model fitted by collapsed Gibbs sampling.

mod biterm;
mod estimate;
mod gibbs;

pub use biterm::{extract_biterms, Biterm, BitermSet};
pub use estimate::{estimate_distributions, list_top_words, TopicDistribution, TopicWordMatrix};
pub use gibbs::{
    gibbs_conditional, run_btm_gibbs, BtmConfig, BtmFit, ConditionalForm, GibbsCounts,
    GibbsSampler,
};
