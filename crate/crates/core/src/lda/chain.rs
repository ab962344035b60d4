use log::{debug, info};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::hyper::{optimize_alpha, optimize_eta_symmetric};
use super::state::GibbsState;
use super::{LdaConfig, Provenance, TopicModel, TopicTermPrior};
use crate::corpus::BowCorpus;
use crate::error::{Error, Result};

/// One sample of the log-joint trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub sweep: usize,
    pub log_joint: f64,
    pub alpha_sum: f64,
    /// Present while η is being optimized.
    pub eta: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub model: TopicModel,
    pub trace: Vec<TraceRow>,
    /// Sampler state after the last sweep.
    pub state: GibbsState,
}

/// Runs one Gibbs chain.
///
/// With `fixed_prior = None` the topic-term prior is a symmetric η that starts
/// at 1 and is re-optimized after every sweep; otherwise the given prior is
/// held fixed. α starts at 1 and is re-optimized after every sweep in both
/// cases.
pub fn run_chain(
    corpus: &BowCorpus,
    cfg: &LdaConfig,
    fixed_prior: Option<TopicTermPrior>,
) -> Result<ChainOutput> {
    cfg.validate()?;
    if corpus.n_docs() == 0 || corpus.total_tokens() == 0 {
        return Err(Error::InvalidInput("corpus has no tokens".into()));
    }
    let (k, v) = (cfg.n_topics, corpus.vocab.len());
    let optimize_eta = fixed_prior.is_none();
    let eta = match fixed_prior {
        None => TopicTermPrior::Symmetric(1.0),
        Some(p @ TopicTermPrior::Symmetric(_)) => p,
        Some(p @ TopicTermPrior::Matrix { k: pk, v: pv, .. }) => {
            if (pk, pv) != (k, v) {
                return Err(Error::InvalidInput(format!(
                    "prior matrix is {pk}×{pv}, but the run has {k} topics and {v} terms"
                )));
            }
            p
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut state = GibbsState::initialize(corpus, k, vec![1.0; k], eta, &mut rng)?;
    let fp = cfg.fixed_point();

    let mut theta_acc = vec![0.0; state.ndk.len()];
    let mut phi_acc = vec![0.0; k * v];
    let mut n_snapshots = 0usize;
    let mut trace = Vec::new();

    for sweep in 1..=cfg.total_iters {
        state.sweep(&mut rng);
        let a_out = optimize_alpha(&mut state.alpha, &state.ndk, &fp);
        if let (true, TopicTermPrior::Symmetric(eta)) = (optimize_eta, &state.eta) {
            let (next, _) = optimize_eta_symmetric(*eta, &state.nki, &state.nk, v, &fp);
            state.eta = TopicTermPrior::Symmetric(next);
        }
        debug!("sweep {sweep}: alpha fixed point took {} iterations", a_out.iterations);

        if sweep > cfg.burn_in && (sweep - cfg.burn_in) % cfg.thin == 0 {
            for (acc, x) in theta_acc.iter_mut().zip(state.estimate_theta()) {
                *acc += x;
            }
            for (acc, x) in phi_acc.iter_mut().zip(state.estimate_phi()) {
                *acc += x;
            }
            n_snapshots += 1;
        }
        if cfg.trace_every > 0 && (sweep % cfg.trace_every == 0 || sweep == cfg.total_iters) {
            let row = TraceRow {
                sweep,
                log_joint: state.log_joint(),
                alpha_sum: state.alpha.iter().sum(),
                eta: match (&state.eta, optimize_eta) {
                    (TopicTermPrior::Symmetric(e), true) => Some(*e),
                    _ => None,
                },
            };
            info!("sweep {sweep}/{}: log joint {:.3}", cfg.total_iters, row.log_joint);
            trace.push(row);
        }
    }

    let theta = average_rows(theta_acc, n_snapshots, k);
    let phi = average_rows(phi_acc, n_snapshots, v);
    let averaged_from = cfg.burn_in + cfg.thin;
    let model = TopicModel {
        k,
        v,
        phi,
        theta,
        alpha: state.alpha.clone(),
        eta: state.eta.clone(),
        provenance: Provenance {
            config: cfg.clone(),
            averaged_from,
            averaged_to: cfg.burn_in + n_snapshots * cfg.thin,
            n_snapshots,
        },
    };
    Ok(ChainOutput { model, trace, state })
}

/// Divides by the snapshot count and removes rounding drift from each row.
fn average_rows(mut acc: Vec<f64>, n: usize, width: usize) -> Vec<f64> {
    for row in acc.chunks_mut(width) {
        let total: f64 = row.iter().sum();
        let scale = if total > 0.0 { 1.0 / total } else { 1.0 / n as f64 };
        row.iter_mut().for_each(|x| *x *= scale);
    }
    acc
}
