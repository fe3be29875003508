//! Metropolis-within-Gibbs sampler for the Gaussian LSIRM.
//!
//! Per iteration, in order: each θ_j, each β_i, each u_j, each v_i by
//! random-walk Metropolis; then σ_θ² and σ² from their inverse-gamma full
//! conditionals. The residual matrix is kept in sync so each component update
//! costs one row or column of the response matrix.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, StandardNormal};

use super::model::{gaussian_log_likelihood, log_prior, LsirmConfig, LsirmState};
use crate::error::{Error, Result};
use crate::io;
use crate::rng::{seeded, Rng};

/// What the chain keeps from one retained iteration. Word effects θ are only
/// tracked through their running mean in [`LsirmChain::theta_mean`].
#[derive(Debug, Clone, PartialEq)]
pub struct LsirmSample {
    pub iteration: usize,
    pub beta: Vec<f64>,
    pub u: DMatrix<f64>,
    pub v: DMatrix<f64>,
    pub sigma2: f64,
    pub sigma2_theta: f64,
    pub log_posterior: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BlockAcceptance {
    pub proposed: u64,
    pub accepted: u64,
}

impl BlockAcceptance {
    pub fn rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    fn record(&mut self, accepted: bool) {
        self.proposed += 1;
        self.accepted += accepted as u64;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AcceptanceSummary {
    pub theta: BlockAcceptance,
    pub beta: BlockAcceptance,
    pub u: BlockAcceptance,
    pub v: BlockAcceptance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsirmChain {
    pub samples: Vec<LsirmSample>,
    pub theta_mean: Vec<f64>,
    pub acceptance: AcceptanceSummary,
    pub n_words: usize,
    pub n_topics: usize,
    pub dim: usize,
}

impl LsirmChain {
    pub fn log_posterior_trace(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.log_posterior)
    }

    /// CSV `iteration,log_posterior,sigma2,sigma2_theta`, one row per retained sample.
    pub fn write_trace(&self, path: &Path) -> Result<()> {
        let header = ["iteration", "log_posterior", "sigma2", "sigma2_theta"].map(String::from);
        io::write_csv(
            path,
            &header,
            self.samples.iter().map(|s| {
                [
                    s.iteration.to_string(),
                    io::fmt_f64(s.log_posterior),
                    io::fmt_f64(s.sigma2),
                    io::fmt_f64(s.sigma2_theta),
                ]
            }),
        )
    }

    /// CSV `block,proposed,accepted,rate`.
    pub fn write_acceptance(&self, path: &Path) -> Result<()> {
        let header = ["block", "proposed", "accepted", "rate"].map(String::from);
        let a = &self.acceptance;
        let blocks = [("theta", a.theta), ("beta", a.beta), ("u", a.u), ("v", a.v)];
        io::write_csv(
            path,
            &header,
            blocks.iter().map(|(name, b)| {
                [
                    name.to_string(),
                    b.proposed.to_string(),
                    b.accepted.to_string(),
                    io::fmt_f64(b.rate()),
                ]
            }),
        )
    }
}

/// Draw from Inv-Gamma(shape, scale).
pub fn sample_inverse_gamma(rng: &mut Rng, shape: f64, scale: f64) -> f64 {
    let gamma = Gamma::new(shape, 1.0 / scale).expect("inverse-gamma parameters must be positive");
    1.0 / gamma.sample(rng)
}

/// Conjugate update for a residual variance with prior Inv-Gamma(a, b) given
/// `count` Gaussian residuals with sum of squares `ssr`.
pub fn sample_variance(rng: &mut Rng, a: f64, b: f64, ssr: f64, count: usize) -> f64 {
    sample_inverse_gamma(rng, a + 0.5 * count as f64, b + 0.5 * ssr)
}

/// Metropolis accept/reject for a symmetric proposal.
#[inline]
pub fn metropolis_accept(log_ratio: f64, rng: &mut Rng) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    rng.random::<f64>().ln() < log_ratio
}

/// Row-major working copy of the chain state.
struct Work {
    n: usize,
    p: usize,
    d: usize,
    x: Vec<f64>,
    theta: Vec<f64>,
    beta: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    dist: Vec<f64>,
    resid: Vec<f64>,
    sigma2: f64,
    sigma2_theta: f64,
}

impl Work {
    fn new(x: &DMatrix<f64>, d: usize) -> Self {
        let (n, p) = x.shape();
        let mut flat = vec![0.0; n * p];
        for j in 0..n {
            for i in 0..p {
                flat[j * p + i] = x[(j, i)];
            }
        }
        Self {
            n,
            p,
            d,
            x: flat,
            theta: vec![0.0; n],
            beta: vec![0.0; p],
            u: vec![0.0; n * d],
            v: vec![0.0; p * d],
            dist: vec![0.0; n * p],
            resid: vec![0.0; n * p],
            sigma2: 1.0,
            sigma2_theta: 1.0,
        }
    }

    fn randomize(&mut self, rng: &mut Rng) {
        let mut normal = || -> f64 { rng.sample(StandardNormal) };
        self.theta.iter_mut().for_each(|t| *t = 0.1 * normal());
        self.beta.iter_mut().for_each(|b| *b = 0.1 * normal());
        self.u.iter_mut().for_each(|c| *c = 0.1 * normal());
        self.v.iter_mut().for_each(|c| *c = 0.1 * normal());
        self.sigma2 = 1.0;
        self.sigma2_theta = 1.0;
        self.refresh();
    }

    #[inline]
    fn distance(&self, uj: &[f64], i: usize) -> f64 {
        let vi = &self.v[i * self.d..(i + 1) * self.d];
        uj.iter()
            .zip(vi)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Recompute distances and residuals from scratch; returns the SSR.
    fn refresh(&mut self) -> f64 {
        let mut ssr = 0.0;
        for j in 0..self.n {
            let uj = self.u[j * self.d..(j + 1) * self.d].to_vec();
            for i in 0..self.p {
                let dji = self.distance(&uj, i);
                let k = j * self.p + i;
                self.dist[k] = dji;
                let r = self.x[k] - self.theta[j] - self.beta[i] + dji;
                self.resid[k] = r;
                ssr += r * r;
            }
        }
        ssr
    }

    fn state(&self) -> LsirmState {
        LsirmState {
            theta: self.theta.clone(),
            beta: self.beta.clone(),
            u: DMatrix::from_row_slice(self.n, self.d, &self.u),
            v: DMatrix::from_row_slice(self.p, self.d, &self.v),
            sigma2: self.sigma2,
            sigma2_theta: self.sigma2_theta,
        }
    }

    fn log_posterior(&self, cfg: &LsirmConfig) -> f64 {
        let ssr: f64 = self.resid.iter().map(|r| r * r).sum();
        gaussian_log_likelihood(ssr, self.n * self.p, self.sigma2) + log_prior(&self.state(), cfg)
    }

    fn update_theta(&mut self, cfg: &LsirmConfig, rng: &mut Rng, acc: &mut BlockAcceptance) {
        let p = self.p as f64;
        for j in 0..self.n {
            let delta = cfg.proposal_theta * rng.sample::<f64, _>(StandardNormal);
            let row = &self.resid[j * self.p..(j + 1) * self.p];
            let sum: f64 = row.iter().sum();
            // residuals shift by -δ
            let d_ssr = -2.0 * delta * sum + p * delta * delta;
            let old = self.theta[j];
            let new = old + delta;
            let log_ratio = -d_ssr / (2.0 * self.sigma2)
                - (new * new - old * old) / (2.0 * self.sigma2_theta);
            let ok = metropolis_accept(log_ratio, rng);
            acc.record(ok);
            if ok {
                self.theta[j] = new;
                self.resid[j * self.p..(j + 1) * self.p]
                    .iter_mut()
                    .for_each(|r| *r -= delta);
            }
        }
    }

    fn update_beta(&mut self, cfg: &LsirmConfig, rng: &mut Rng, acc: &mut BlockAcceptance) {
        let n = self.n as f64;
        for i in 0..self.p {
            let delta = cfg.proposal_beta * rng.sample::<f64, _>(StandardNormal);
            let sum: f64 = (0..self.n).map(|j| self.resid[j * self.p + i]).sum();
            let d_ssr = -2.0 * delta * sum + n * delta * delta;
            let old = self.beta[i];
            let new = old + delta;
            let log_ratio =
                -d_ssr / (2.0 * self.sigma2) - (new * new - old * old) / (2.0 * cfg.tau2_beta);
            let ok = metropolis_accept(log_ratio, rng);
            acc.record(ok);
            if ok {
                self.beta[i] = new;
                for j in 0..self.n {
                    self.resid[j * self.p + i] -= delta;
                }
            }
        }
    }

    fn update_u(
        &mut self,
        cfg: &LsirmConfig,
        rng: &mut Rng,
        acc: &mut BlockAcceptance,
        scratch: &mut Vec<f64>,
    ) {
        let d = self.d;
        let mut proposal = vec![0.0; d];
        for j in 0..self.n {
            let old = &self.u[j * d..(j + 1) * d];
            for (c, slot) in proposal.iter_mut().enumerate() {
                *slot = old[c] + cfg.proposal_position * rng.sample::<f64, _>(StandardNormal);
            }
            let old_sq: f64 = old.iter().map(|c| c * c).sum();
            let new_sq: f64 = proposal.iter().map(|c| c * c).sum();
            scratch.clear();
            let mut d_ssr = 0.0;
            for i in 0..self.p {
                let k = j * self.p + i;
                let nd = self.distance(&proposal, i);
                let r_new = self.resid[k] + nd - self.dist[k];
                d_ssr += r_new * r_new - self.resid[k] * self.resid[k];
                scratch.push(nd);
            }
            let log_ratio = -d_ssr / (2.0 * self.sigma2) - 0.5 * (new_sq - old_sq);
            let ok = metropolis_accept(log_ratio, rng);
            acc.record(ok);
            if ok {
                self.u[j * d..(j + 1) * d].copy_from_slice(&proposal);
                for i in 0..self.p {
                    let k = j * self.p + i;
                    self.resid[k] += scratch[i] - self.dist[k];
                    self.dist[k] = scratch[i];
                }
            }
        }
    }

    fn update_v(
        &mut self,
        cfg: &LsirmConfig,
        rng: &mut Rng,
        acc: &mut BlockAcceptance,
        scratch: &mut Vec<f64>,
    ) {
        let d = self.d;
        let mut proposal = vec![0.0; d];
        for i in 0..self.p {
            let old = &self.v[i * d..(i + 1) * d];
            for (c, slot) in proposal.iter_mut().enumerate() {
                *slot = old[c] + cfg.proposal_position * rng.sample::<f64, _>(StandardNormal);
            }
            let old_sq: f64 = old.iter().map(|c| c * c).sum();
            let new_sq: f64 = proposal.iter().map(|c| c * c).sum();
            scratch.clear();
            let mut d_ssr = 0.0;
            for j in 0..self.n {
                let k = j * self.p + i;
                let uj = &self.u[j * d..(j + 1) * d];
                let nd = uj
                    .iter()
                    .zip(&proposal)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let r_new = self.resid[k] + nd - self.dist[k];
                d_ssr += r_new * r_new - self.resid[k] * self.resid[k];
                scratch.push(nd);
            }
            let log_ratio = -d_ssr / (2.0 * self.sigma2) - 0.5 * (new_sq - old_sq);
            let ok = metropolis_accept(log_ratio, rng);
            acc.record(ok);
            if ok {
                self.v[i * d..(i + 1) * d].copy_from_slice(&proposal);
                for j in 0..self.n {
                    let k = j * self.p + i;
                    self.resid[k] += scratch[j] - self.dist[k];
                    self.dist[k] = scratch[j];
                }
            }
        }
    }
}

/// Fit the Gaussian LSIRM to a words x topics response matrix.
pub fn run_lsirm_mcmc(x: &DMatrix<f64>, cfg: &LsirmConfig) -> Result<LsirmChain> {
    cfg.validate()?;
    let (n, p) = x.shape();
    if n < 2 || p < 2 {
        return Err(Error::Input(format!(
            "LSIRM needs at least 2 words and 2 topics, got {n} x {p}"
        )));
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::Input("response matrix has non-finite entries".into()));
    }

    let mut rng = seeded(cfg.seed);
    let mut work = Work::new(x, cfg.dim);
    let mut attempts = 0;
    loop {
        work.randomize(&mut rng);
        if work.log_posterior(cfg).is_finite() {
            break;
        }
        attempts += 1;
        if attempts > cfg.init_retries {
            return Err(Error::Numerical(
                "log posterior is not finite at any initial state".into(),
            ));
        }
    }

    let mut acceptance = AcceptanceSummary::default();
    let mut samples = Vec::with_capacity(cfg.retained_samples());
    let mut theta_sum = vec![0.0; n];
    let mut scratch = Vec::with_capacity(n.max(p));

    for it in 1..=cfg.iterations {
        work.update_theta(cfg, &mut rng, &mut acceptance.theta);
        work.update_beta(cfg, &mut rng, &mut acceptance.beta);
        work.update_u(cfg, &mut rng, &mut acceptance.u, &mut scratch);
        work.update_v(cfg, &mut rng, &mut acceptance.v, &mut scratch);

        let theta_sq: f64 = work.theta.iter().map(|t| t * t).sum();
        work.sigma2_theta = sample_variance(&mut rng, cfg.a_sigma, cfg.b_sigma, theta_sq, n);
        let ssr = work.refresh();
        work.sigma2 = sample_variance(&mut rng, cfg.a, cfg.b, ssr, n * p);

        if it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0 {
            let log_posterior = work.log_posterior(cfg);
            if !log_posterior.is_finite() {
                return Err(Error::Numerical(format!(
                    "log posterior became non-finite at iteration {it}"
                )));
            }
            for (acc, t) in theta_sum.iter_mut().zip(&work.theta) {
                *acc += t;
            }
            samples.push(LsirmSample {
                iteration: it,
                beta: work.beta.clone(),
                u: DMatrix::from_row_slice(n, cfg.dim, &work.u),
                v: DMatrix::from_row_slice(p, cfg.dim, &work.v),
                sigma2: work.sigma2,
                sigma2_theta: work.sigma2_theta,
                log_posterior,
            });
        }
    }

    let kept = samples.len().max(1) as f64;
    Ok(LsirmChain {
        samples,
        theta_mean: theta_sum.iter().map(|t| t / kept).collect(),
        acceptance,
        n_words: n,
        n_topics: p,
        dim: cfg.dim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg(seed: u64) -> LsirmConfig {
        LsirmConfig {
            iterations: 300,
            burn_in: 100,
            thin: 10,
            seed,
            ..Default::default()
        }
    }

    fn data() -> DMatrix<f64> {
        DMatrix::from_fn(15, 4, |j, i| ((j * 3 + i * 5) % 7) as f64 / 7.0)
    }

    #[test]
    fn retained_count_matches_arithmetic() {
        let chain = run_lsirm_mcmc(&data(), &small_cfg(1)).unwrap();
        assert_eq!(chain.samples.len(), 20);
        assert!(chain.log_posterior_trace().all(f64::is_finite));
        assert_eq!(chain.samples[0].iteration, 110);
    }

    #[test]
    fn same_seed_same_chain() {
        let a = run_lsirm_mcmc(&data(), &small_cfg(5)).unwrap();
        let b = run_lsirm_mcmc(&data(), &small_cfg(5)).unwrap();
        assert_eq!(a, b);
        let c = run_lsirm_mcmc(&data(), &small_cfg(6)).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn rejects_tiny_or_bad_input() {
        let cfg = small_cfg(1);
        assert!(run_lsirm_mcmc(&DMatrix::zeros(1, 4), &cfg).is_err());
        let mut x = data();
        x[(0, 0)] = f64::NAN;
        assert!(run_lsirm_mcmc(&x, &cfg).is_err());
        let bad = LsirmConfig {
            burn_in: 300,
            ..cfg
        };
        assert!(run_lsirm_mcmc(&data(), &bad).is_err());
    }

    #[test]
    fn incremental_residuals_match_recompute() {
        let x = data();
        let cfg = small_cfg(2);
        let mut rng = seeded(3);
        let mut work = Work::new(&x, 2);
        work.randomize(&mut rng);
        let mut acc = AcceptanceSummary::default();
        let mut scratch = Vec::new();
        for _ in 0..20 {
            work.update_theta(&cfg, &mut rng, &mut acc.theta);
            work.update_beta(&cfg, &mut rng, &mut acc.beta);
            work.update_u(&cfg, &mut rng, &mut acc.u, &mut scratch);
            work.update_v(&cfg, &mut rng, &mut acc.v, &mut scratch);
        }
        let incremental = work.resid.clone();
        work.refresh();
        for (a, b) in incremental.iter().zip(&work.resid) {
            assert!((a - b).abs() < 1e-12);
        }
        let ll = super::super::model::lsirm_log_likelihood(&x, &work.state()).unwrap();
        let ssr: f64 = work.resid.iter().map(|r| r * r).sum();
        assert!((ll - gaussian_log_likelihood(ssr, x.len(), work.sigma2)).abs() < 1e-9);
    }

    #[test]
    fn forced_metropolis_cases() {
        let mut rng = seeded(0);
        for _ in 0..1000 {
            assert!(metropolis_accept(0.0, &mut rng));
            assert!(metropolis_accept(1e-9, &mut rng));
            assert!(!metropolis_accept(f64::NEG_INFINITY, &mut rng));
        }
        let accepted = (0..20_000)
            .filter(|_| metropolis_accept(0.5f64.ln(), &mut rng))
            .count();
        assert!((accepted as f64 / 20_000.0 - 0.5).abs() < 0.02);
    }

    #[test]
    fn variance_update_moments() {
        let mut rng = seeded(17);
        let (a, b, ssr, count) = (0.001, 0.001, 12.0, 40);
        let shape = a + 0.5 * count as f64;
        let scale = b + 0.5 * ssr;
        let mean = scale / (shape - 1.0);
        let var = scale * scale / ((shape - 1.0).powi(2) * (shape - 2.0));
        let draws: Vec<f64> = (0..100_000)
            .map(|_| sample_variance(&mut rng, a, b, ssr, count))
            .collect();
        let m = draws.iter().sum::<f64>() / draws.len() as f64;
        let v = draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
        let se_mean = (var / draws.len() as f64).sqrt();
        assert!((m - mean).abs() < 3.0 * se_mean, "mean {m} vs {mean}");
        // fourth moment exists for shape > 4; sd of the sample variance is ~ var·sqrt(2/n · kurtosis term)
        assert!((v - var).abs() / var < 0.05, "var {v} vs {var}");
    }
}
