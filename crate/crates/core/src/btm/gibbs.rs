//! Collapsed Gibbs sampling for the biterm topic model.
//!
//! Every biterm instance `b = (w_i, w_j)` carries a topic assignment. With the
//! instance removed from the counts, its topic is redrawn from
//!
//! ```text
//! p(z | z_-b) ∝ (n_z + α) (n_{w_i|z} + β) (n_{w_j|z} + β) / (Σ_w n_{w|z} + Mβ)²
//! ```
//!
//! [`ConditionalForm::Exact`] replaces the squared denominator with
//! `(Σ_w n_{w|z} + Mβ)(Σ_w n_{w|z} + Mβ + 1)`, the exact ratio of the
//! Dirichlet-multinomial marginal when the two words differ.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::biterm::BitermSet;
use super::estimate::{estimate_distributions, TopicDistribution, TopicWordMatrix};
use crate::error::{Error, Result};
use crate::rng::{seeded, Rng};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionalForm {
    #[default]
    Squared,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BtmConfig {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    /// Sweeps after burn-in.
    pub iterations: usize,
    pub burn_in: usize,
    /// Keep every `thin`-th post-burn-in sweep.
    pub thin: usize,
    pub seed: u64,
    pub token_cap: Option<usize>,
    pub conditional: ConditionalForm,
    /// Keep the full counts of every retained sweep (memory heavy).
    pub keep_samples: bool,
}

impl Default for BtmConfig {
    fn default() -> Self {
        Self {
            topics: 20,
            alpha: 3.0,
            beta: 0.01,
            iterations: 50_000,
            burn_in: 20_000,
            thin: 100,
            seed: 0,
            token_cap: None,
            conditional: ConditionalForm::Squared,
            keep_samples: false,
        }
    }
}

impl BtmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.topics < 2 {
            return Err(Error::Config("BTM needs at least 2 topics".into()));
        }
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return Err(Error::Config("alpha and beta must be positive".into()));
        }
        if self.thin == 0 {
            return Err(Error::Config("thin must be at least 1".into()));
        }
        if self.iterations < self.thin {
            return Err(Error::Config(
                "iterations must cover at least one thinning interval".into(),
            ));
        }
        Ok(())
    }

    pub fn retained_samples(&self) -> usize {
        self.iterations / self.thin
    }
}

/// Sufficient statistics of a topic assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GibbsCounts {
    pub topics: usize,
    pub vocab_size: usize,
    /// Biterm instances per topic.
    pub n_z: Vec<u64>,
    /// Row-major `M x K` word-in-topic counts.
    pub n_wz: Vec<u64>,
    /// Σ_w n_wz per topic.
    pub n_w_total: Vec<u64>,
    /// Topic of each biterm instance (empty for hand-built counts).
    pub z: Vec<usize>,
}

impl GibbsCounts {
    pub fn zeros(topics: usize, vocab_size: usize) -> Self {
        Self {
            topics,
            vocab_size,
            n_z: vec![0; topics],
            n_wz: vec![0; topics * vocab_size],
            n_w_total: vec![0; topics],
            z: Vec::new(),
        }
    }

    /// Counts given directly, without assignments. `n_wz` is row-major `M x K`.
    pub fn from_counts(n_z: Vec<u64>, n_wz: Vec<u64>, vocab_size: usize) -> Result<Self> {
        let topics = n_z.len();
        if n_wz.len() != topics * vocab_size {
            return Err(Error::Shape(format!(
                "n_wz has {} entries, expected {} x {}",
                n_wz.len(),
                vocab_size,
                topics
            )));
        }
        let mut n_w_total = vec![0; topics];
        for w in 0..vocab_size {
            for z in 0..topics {
                n_w_total[z] += n_wz[w * topics + z];
            }
        }
        Ok(Self {
            topics,
            vocab_size,
            n_z,
            n_wz,
            n_w_total,
            z: Vec::new(),
        })
    }

    #[inline]
    pub fn word_topic(&self, w: usize, z: usize) -> u64 {
        self.n_wz[w * self.topics + z]
    }

    pub fn total_biterms(&self) -> u64 {
        self.n_z.iter().sum()
    }

    #[inline]
    pub fn add(&mut self, (wi, wj): (usize, usize), z: usize) {
        self.n_z[z] += 1;
        self.n_wz[wi * self.topics + z] += 1;
        self.n_wz[wj * self.topics + z] += 1;
        self.n_w_total[z] += 2;
    }

    #[inline]
    pub fn remove(&mut self, (wi, wj): (usize, usize), z: usize) {
        self.n_z[z] -= 1;
        self.n_wz[wi * self.topics + z] -= 1;
        self.n_wz[wj * self.topics + z] -= 1;
        self.n_w_total[z] -= 2;
    }

    /// Check the conservation laws: Σ_z n_z = |B| and Σ_w n_wz = 2 n_z.
    pub fn check(&self, total_biterms: u64) -> Result<()> {
        if self.total_biterms() != total_biterms {
            return Err(Error::Numerical(format!(
                "topic counts sum to {}, expected {total_biterms}",
                self.total_biterms()
            )));
        }
        for z in 0..self.topics {
            let col: u64 = (0..self.vocab_size).map(|w| self.word_topic(w, z)).sum();
            if col != 2 * self.n_z[z] || col != self.n_w_total[z] {
                return Err(Error::Numerical(format!(
                    "topic {z}: word counts sum to {col}, expected {}",
                    2 * self.n_z[z]
                )));
            }
        }
        Ok(())
    }
}

/// Fill `out` with the unnormalized conditional weights and return their sum.
#[inline]
fn conditional_weights(
    (wi, wj): (usize, usize),
    counts: &GibbsCounts,
    alpha: f64,
    beta: f64,
    form: ConditionalForm,
    out: &mut [f64],
) -> f64 {
    let m_beta = counts.vocab_size as f64 * beta;
    let k = counts.topics;
    let mut total = 0.0;
    for (z, slot) in out.iter_mut().enumerate().take(k) {
        let denom_base = counts.n_w_total[z] as f64 + m_beta;
        let denom = match form {
            ConditionalForm::Squared => denom_base * denom_base,
            ConditionalForm::Exact => denom_base * (denom_base + 1.0),
        };
        let w = (counts.n_z[z] as f64 + alpha)
            * (counts.n_wz[wi * k + z] as f64 + beta)
            * (counts.n_wz[wj * k + z] as f64 + beta)
            / denom;
        *slot = w;
        total += w;
    }
    total
}

/// Normalized conditional topic distribution of biterm `b`.
///
/// `counts` must already exclude `b`'s own assignment.
pub fn gibbs_conditional(b: (usize, usize), counts: &GibbsCounts, cfg: &BtmConfig) -> Vec<f64> {
    let mut p = vec![0.0; counts.topics];
    let total = conditional_weights(b, counts, cfg.alpha, cfg.beta, cfg.conditional, &mut p);
    for v in &mut p {
        *v /= total;
    }
    p
}

/// Single collapsed Gibbs chain over a fixed set of biterm instances.
pub struct GibbsSampler {
    instances: Vec<(usize, usize)>,
    counts: GibbsCounts,
    alpha: f64,
    beta: f64,
    form: ConditionalForm,
    rng: Rng,
    weights: Vec<f64>,
}

impl GibbsSampler {
    /// Random uniform initial topic for every biterm instance.
    pub fn new(biterms: &BitermSet, cfg: &BtmConfig) -> Result<Self> {
        cfg.validate()?;
        let instances = biterms.instances();
        if instances.is_empty() {
            return Err(Error::Input("biterm set is empty".into()));
        }
        let mut rng = seeded(cfg.seed);
        let mut counts = GibbsCounts::zeros(cfg.topics, biterms.vocab_size());
        counts.z = Vec::with_capacity(instances.len());
        for &b in &instances {
            let z = rng.random_range(0..cfg.topics);
            counts.add(b, z);
            counts.z.push(z);
        }
        Ok(Self {
            instances,
            counts,
            alpha: cfg.alpha,
            beta: cfg.beta,
            form: cfg.conditional,
            rng,
            weights: vec![0.0; cfg.topics],
        })
    }

    pub fn counts(&self) -> &GibbsCounts {
        &self.counts
    }

    pub fn assignments(&self) -> &[usize] {
        &self.counts.z
    }

    /// Resample every biterm instance once, in order.
    pub fn sweep(&mut self) {
        for idx in 0..self.instances.len() {
            let b = self.instances[idx];
            let old = self.counts.z[idx];
            self.counts.remove(b, old);
            let total = conditional_weights(
                b,
                &self.counts,
                self.alpha,
                self.beta,
                self.form,
                &mut self.weights,
            );
            let mut u = self.rng.random::<f64>() * total;
            let mut new = self.weights.len() - 1;
            for (z, &w) in self.weights.iter().enumerate() {
                if u < w {
                    new = z;
                    break;
                }
                u -= w;
            }
            self.counts.add(b, new);
            self.counts.z[idx] = new;
        }
        debug_assert!(self.counts.check(self.instances.len() as u64).is_ok());
    }
}

/// Result of a BTM fit.
#[derive(Debug, Clone)]
pub struct BtmFit {
    pub counts: GibbsCounts,
    /// φ averaged over retained sweeps.
    pub phi: TopicWordMatrix,
    /// θ averaged over retained sweeps.
    pub theta: TopicDistribution,
    pub retained: usize,
    /// Per-sweep counts, only when `keep_samples` is set.
    pub samples: Vec<GibbsCounts>,
}

/// Run burn-in plus `iterations` sweeps and average φ, θ over retained sweeps.
pub fn run_btm_gibbs(biterms: &BitermSet, cfg: &BtmConfig) -> Result<BtmFit> {
    let mut sampler = GibbsSampler::new(biterms, cfg)?;
    let m = biterms.vocab_size();
    let k = cfg.topics;
    let mut phi_sum = nalgebra::DMatrix::<f64>::zeros(m, k);
    let mut theta_sum = vec![0.0; k];
    let mut retained = 0usize;
    let mut samples = Vec::new();

    for _ in 0..cfg.burn_in {
        sampler.sweep();
    }
    for it in 1..=cfg.iterations {
        sampler.sweep();
        if it % cfg.thin != 0 {
            continue;
        }
        let (phi, theta) = estimate_distributions(sampler.counts(), &biterms.vocabulary, cfg);
        phi_sum += &phi.values;
        for (acc, v) in theta_sum.iter_mut().zip(&theta.theta) {
            *acc += v;
        }
        retained += 1;
        if cfg.keep_samples {
            samples.push(sampler.counts().clone());
        }
    }

    let scale = 1.0 / retained as f64;
    let phi = TopicWordMatrix::new(biterms.vocabulary.tokens().to_vec(), phi_sum * scale)?;
    let theta = TopicDistribution {
        theta: theta_sum.iter().map(|v| v * scale).collect(),
    };
    Ok(BtmFit {
        counts: sampler.counts,
        phi,
        theta,
        retained,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(k: usize, alpha: f64, beta: f64) -> BtmConfig {
        BtmConfig {
            topics: k,
            alpha,
            beta,
            iterations: 10,
            burn_in: 0,
            thin: 1,
            ..Default::default()
        }
    }

    #[test]
    fn symmetric_when_counts_are_zero() {
        let counts = GibbsCounts::zeros(2, 3);
        let p = gibbs_conditional((0, 1), &counts, &cfg(2, 0.7, 0.3));
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn hand_evaluated_conditional() {
        // topic 0: n_z = 2, words 0 and 1 once each, word 2 twice; topic 1 empty
        let counts = GibbsCounts::from_counts(vec![2, 0], vec![1, 0, 1, 0, 2, 0], 3).unwrap();
        let c = cfg(2, 1.0, 0.5);
        let mut raw = vec![0.0; 2];
        conditional_weights((0, 1), &counts, 1.0, 0.5, ConditionalForm::Squared, &mut raw);
        assert!((raw[0] - 0.2231405).abs() < 1e-7);
        assert!((raw[1] - 0.1111111).abs() < 1e-7);
        let p = gibbs_conditional((0, 1), &counts, &c);
        assert!((p[0] - 0.667583).abs() < 1e-6);
        assert!((p[1] - 0.332417).abs() < 1e-6);
    }

    #[test]
    fn remove_decrements_three_counts() {
        let mut counts = GibbsCounts::zeros(2, 3);
        counts.add((0, 2), 1);
        counts.add((1, 2), 1);
        counts.remove((0, 2), 1);
        assert_eq!(counts.n_z, vec![0, 1]);
        assert_eq!(counts.word_topic(0, 1), 0);
        assert_eq!(counts.word_topic(2, 1), 1);
        assert!(counts.check(1).is_ok());
    }

    #[test]
    fn counts_conserved_after_sweeps() {
        let set = BitermSet::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]);
        let mut sampler = GibbsSampler::new(&set, &cfg(3, 1.0, 0.1)).unwrap();
        for _ in 0..50 {
            sampler.sweep();
            sampler.counts().check(5).unwrap();
        }
    }

    #[test]
    fn same_seed_same_fit() {
        let set = BitermSet::from_pairs(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let c = BtmConfig {
            seed: 99,
            keep_samples: true,
            ..cfg(2, 1.0, 0.5)
        };
        let a = run_btm_gibbs(&set, &c).unwrap();
        let b = run_btm_gibbs(&set, &c).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.phi, b.phi);
        assert_eq!(a.retained, 10);
    }

    #[test]
    fn config_validation() {
        assert!(cfg(1, 1.0, 1.0).validate().is_err());
        assert!(cfg(2, 0.0, 1.0).validate().is_err());
        assert!(cfg(2, 1.0, -1.0).validate().is_err());
        let c = BtmConfig {
            thin: 0,
            ..cfg(2, 1.0, 1.0)
        };
        assert!(c.validate().is_err());
        assert_eq!(BtmConfig::default().retained_samples(), 500);
    }

    proptest::proptest! {
        #[test]
        fn conditional_is_normalized(
            nz in proptest::collection::vec(0u64..20, 3),
            extra in proptest::collection::vec(0u64..5, 12),
            alpha in 0.01f64..5.0,
            beta in 0.001f64..2.0,
        ) {
            // four words, three topics; word-topic counts need not be consistent here
            let counts = GibbsCounts::from_counts(nz, extra, 4).unwrap();
            for form in [ConditionalForm::Squared, ConditionalForm::Exact] {
                let c = BtmConfig { conditional: form, ..cfg(3, alpha, beta) };
                let p = gibbs_conditional((1, 3), &counts, &c);
                let s: f64 = p.iter().sum();
                proptest::prop_assert!((s - 1.0).abs() < 1e-12);
                proptest::prop_assert!(p.iter().all(|v| *v >= 0.0));
            }
        }
    }
}
