//! Gaussian latent space item response model.
//!
//! Rows of the response matrix are words ("respondents"), columns are topics
//! ("items"):
//!
//! ```text
//! x_{j,i} = θ_j + β_i - ‖u_j - v_i‖ + ε_{j,i},   ε_{j,i} ~ N(0, σ²)
//! ```
//!
//! Priors: `β_i ~ N(0, τ²_β)` with τ²_β fixed, `θ_j ~ N(0, σ_θ²)`,
//! `σ² ~ Inv-Gamma(a, b)`, `σ_θ² ~ Inv-Gamma(a_σ, b_σ)`, and standard normal
//! `u_j`, `v_i` in `d` dimensions.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which retained sample serves as the within-chain alignment target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignmentReference {
    #[default]
    MaxPosterior,
    Last,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LsirmConfig {
    /// Latent dimension d.
    pub dim: usize,
    /// Total iterations, burn-in included.
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub proposal_beta: f64,
    pub proposal_theta: f64,
    pub proposal_position: f64,
    pub tau2_beta: f64,
    /// Inverse-gamma shape and scale of the σ_θ² prior.
    pub a_sigma: f64,
    pub b_sigma: f64,
    /// Inverse-gamma shape and scale of the σ² prior.
    pub a: f64,
    pub b: f64,
    pub seed: u64,
    pub reference: AlignmentReference,
    pub init_retries: usize,
}

impl Default for LsirmConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            iterations: 55_000,
            burn_in: 5_000,
            thin: 5,
            proposal_beta: 0.28,
            proposal_theta: 1.0,
            proposal_position: 0.06,
            tau2_beta: 1.0,
            a_sigma: 0.001,
            b_sigma: 0.001,
            a: 0.001,
            b: 0.001,
            seed: 0,
            reference: AlignmentReference::MaxPosterior,
            init_retries: 10,
        }
    }
}

impl LsirmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("latent dimension must be at least 1".into()));
        }
        if self.thin == 0 || self.burn_in >= self.iterations {
            return Err(Error::Config(
                "need thin >= 1 and burn_in < iterations".into(),
            ));
        }
        let positive = [
            ("proposal_beta", self.proposal_beta),
            ("proposal_theta", self.proposal_theta),
            ("proposal_position", self.proposal_position),
            ("tau2_beta", self.tau2_beta),
            ("a_sigma", self.a_sigma),
            ("b_sigma", self.b_sigma),
            ("a", self.a),
            ("b", self.b),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Number of samples kept: (iterations - burn_in) / thin.
    pub fn retained_samples(&self) -> usize {
        (self.iterations - self.burn_in) / self.thin
    }
}

/// One full parameter configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct LsirmState {
    /// Word main effects, length N.
    pub theta: Vec<f64>,
    /// Topic main effects, length P.
    pub beta: Vec<f64>,
    /// Word positions, N x d.
    pub u: DMatrix<f64>,
    /// Topic positions, P x d.
    pub v: DMatrix<f64>,
    pub sigma2: f64,
    pub sigma2_theta: f64,
}

impl LsirmState {
    pub fn n_words(&self) -> usize {
        self.theta.len()
    }

    pub fn n_topics(&self) -> usize {
        self.beta.len()
    }

    pub fn is_finite(&self) -> bool {
        self.theta
            .iter()
            .chain(&self.beta)
            .chain(self.u.iter())
            .chain(self.v.iter())
            .all(|v| v.is_finite())
            && self.sigma2.is_finite()
            && self.sigma2_theta.is_finite()
    }

    fn check_shape(&self, x: &DMatrix<f64>) -> Result<()> {
        let (n, p) = x.shape();
        if self.theta.len() != n
            || self.beta.len() != p
            || self.u.nrows() != n
            || self.v.nrows() != p
            || self.u.ncols() != self.v.ncols()
        {
            return Err(Error::Shape(format!(
                "state (N={}, P={}, d={}) does not fit a {n} x {p} response matrix",
                self.theta.len(),
                self.beta.len(),
                self.u.ncols()
            )));
        }
        Ok(())
    }

    /// Model mean θ_j + β_i - ‖u_j - v_i‖.
    pub fn mean(&self, j: usize, i: usize) -> f64 {
        self.theta[j] + self.beta[i] - row_distance(&self.u, j, &self.v, i)
    }
}

pub(crate) fn row_distance(a: &DMatrix<f64>, ra: usize, b: &DMatrix<f64>, rb: usize) -> f64 {
    let mut s = 0.0;
    for c in 0..a.ncols() {
        let diff = a[(ra, c)] - b[(rb, c)];
        s += diff * diff;
    }
    s.sqrt()
}

/// Σ_{j,i} ln N(x_{j,i}; θ_j + β_i - ‖u_j - v_i‖, σ²).
pub fn lsirm_log_likelihood(x: &DMatrix<f64>, state: &LsirmState) -> Result<f64> {
    state.check_shape(x)?;
    if !(state.sigma2 > 0.0) {
        return Err(Error::Numerical(format!(
            "residual variance must be positive, got {}",
            state.sigma2
        )));
    }
    let mut ssr = 0.0;
    for j in 0..x.nrows() {
        for i in 0..x.ncols() {
            let r = x[(j, i)] - state.mean(j, i);
            ssr += r * r;
        }
    }
    Ok(gaussian_log_likelihood(ssr, x.len(), state.sigma2))
}

pub(crate) fn gaussian_log_likelihood(ssr: f64, count: usize, sigma2: f64) -> f64 {
    -0.5 * count as f64 * (2.0 * PI * sigma2).ln() - ssr / (2.0 * sigma2)
}

/// Log prior density up to an additive constant that does not depend on the state.
pub fn log_prior(state: &LsirmState, cfg: &LsirmConfig) -> f64 {
    let n = state.theta.len() as f64;
    let theta_sq: f64 = state.theta.iter().map(|t| t * t).sum();
    let beta_sq: f64 = state.beta.iter().map(|b| b * b).sum();
    let pos_sq: f64 = state.u.iter().chain(state.v.iter()).map(|v| v * v).sum();
    let s2t = state.sigma2_theta;
    -0.5 * n * s2t.ln() - theta_sq / (2.0 * s2t)
        - beta_sq / (2.0 * cfg.tau2_beta)
        - 0.5 * pos_sq
        - (cfg.a_sigma + 1.0) * s2t.ln()
        - cfg.b_sigma / s2t
        - (cfg.a + 1.0) * state.sigma2.ln()
        - cfg.b / state.sigma2
}

pub fn log_posterior(x: &DMatrix<f64>, state: &LsirmState, cfg: &LsirmConfig) -> Result<f64> {
    Ok(lsirm_log_likelihood(x, state)? + log_prior(state, cfg))
}
