//! LDA by collapsed Gibbs sampling.
//!
//! θ and Φ are integrated out; the sampler walks topic assignments only and
//! maintains three count tables. After every sweep the document-topic
//! concentration α (and, with a symmetric prior, the topic-term concentration
//! η) is moved to its MAP value under Gamma(shape, scale) hyperpriors by
//! fixed-point iteration. Posterior means of θ and Φ are averaged over every
//! post-burn-in sweep.

mod chain;
mod checkpoint;
mod hyper;
mod state;

pub use chain::{run_chain, ChainOutput, TraceRow};
pub use checkpoint::{read_checkpoint, read_prior, write_checkpoint, write_prior, THETA_CUTOFF};
pub use hyper::{
    optimize_alpha, optimize_eta_symmetric, FixedPoint,
    FixedPointOutcome, MIN_CONCENTRATION,
};
pub use state::GibbsState;
pub(crate) use state::sample_categorical;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LdaConfig {
    pub n_topics: usize,
    pub total_iters: usize,
    pub burn_in: usize,
    pub gamma_shape: f64,
    pub gamma_scale: f64,
    pub fixed_point_tol: f64,
    pub max_fixed_point_iters: usize,
    /// Keep every `thin`-th post-burn-in sweep in the average.
    pub thin: usize,
    /// Log-joint trace cadence in sweeps; 0 disables the trace.
    pub trace_every: usize,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        Self {
            n_topics: 25,
            total_iters: 15_000,
            burn_in: 10_000,
            gamma_shape: 0.01,
            gamma_scale: 100.0,
            fixed_point_tol: 0.01,
            max_fixed_point_iters: 1000,
            thin: 1,
            trace_every: 100,
            seed: 1,
        }
    }
}

impl LdaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_topics < 2 {
            return Err(Error::InvalidInput(format!("n_topics must be at least 2, got {}", self.n_topics)));
        }
        if self.burn_in == 0 || self.burn_in >= self.total_iters {
            return Err(Error::InvalidInput(format!(
                "need 0 < burn_in < total_iters, got burn_in={} total_iters={}",
                self.burn_in, self.total_iters
            )));
        }
        if !(self.gamma_shape > 0.0 && self.gamma_scale > 0.0) {
            return Err(Error::InvalidInput("gamma_shape and gamma_scale must be positive".into()));
        }
        if !(self.fixed_point_tol > 0.0) || self.max_fixed_point_iters == 0 {
            return Err(Error::InvalidInput("fixed_point_tol and max_fixed_point_iters must be positive".into()));
        }
        if self.thin == 0 {
            return Err(Error::InvalidInput("thin must be at least 1".into()));
        }
        Ok(())
    }

    pub fn fixed_point(&self) -> FixedPoint {
        FixedPoint {
            shape: self.gamma_shape,
            scale: self.gamma_scale,
            tol: self.fixed_point_tol,
            max_iters: self.max_fixed_point_iters,
        }
    }
}

/// Dirichlet parameters of the topic-term distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum TopicTermPrior {
    /// One scalar shared by every topic and term.
    Symmetric(f64),
    /// Per-topic parameter vectors, `K × V` row-major.
    Matrix { k: usize, v: usize, values: Vec<f64>, row_sums: Vec<f64> },
}

impl TopicTermPrior {
    pub fn matrix(k: usize, v: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != k * v {
            return Err(Error::InvalidInput(format!(
                "prior matrix has {} entries, expected {k}×{v}",
                values.len()
            )));
        }
        if values.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("prior entries must be positive and finite".into()));
        }
        let row_sums = values.chunks(v).map(|r| r.iter().sum()).collect();
        Ok(Self::Matrix { k, v, values, row_sums })
    }

    #[inline]
    pub fn get(&self, topic: usize, term: usize) -> f64 {
        match self {
            Self::Symmetric(eta) => *eta,
            Self::Matrix { v, values, .. } => values[topic * v + term],
        }
    }

    #[inline]
    pub fn row_sum(&self, topic: usize, v: usize) -> f64 {
        match self {
            Self::Symmetric(eta) => eta * v as f64,
            Self::Matrix { row_sums, .. } => row_sums[topic],
        }
    }

    pub fn is_symmetric(&self) -> bool {
        matches!(self, Self::Symmetric(_))
    }
}

/// Posterior-mean topic model.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicModel {
    pub k: usize,
    pub v: usize,
    /// `K × V` row-major, rows sum to one.
    pub phi: Vec<f64>,
    /// `D × K` row-major, rows sum to one.
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub eta: TopicTermPrior,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: LdaConfig,
    /// First and last sweep included in the average (1-based, inclusive).
    pub averaged_from: usize,
    pub averaged_to: usize,
    pub n_snapshots: usize,
}

impl TopicModel {
    pub fn n_docs(&self) -> usize {
        self.theta.len() / self.k
    }

    pub fn phi_row(&self, topic: usize) -> &[f64] {
        &self.phi[topic * self.v..(topic + 1) * self.v]
    }

    pub fn theta_row(&self, doc: usize) -> &[f64] {
        &self.theta[doc * self.k..(doc + 1) * self.k]
    }
}
