//! MAP fixed-point updates for the Dirichlet concentrations.
//!
//! With a Gamma(shape c, scale s) hyperprior on each concentration, the
//! stationarity condition of the Dirichlet-multinomial log posterior gives
//! the update
//!
//! ```text
//! α_k ← α_k · (Σ_d[ψ(N_dk + α_k) − ψ(α_k)] + (c − 1)/α_k) / (Σ_d[ψ(N_d + a) − ψ(a)] + 1/s)
//! ```
//!
//! with `a = Σ_k α_k`, and the analogous update for a single symmetric η
//! summed over all topic-term cells. Digamma differences at integer offsets
//! are evaluated as `Σ_j tail[j] / (x + j)` where `tail[j]` counts the cells
//! with more than `j` tokens.

use log::warn;

use crate::special::digamma_diff;

/// Concentrations at which a coordinate is parked once its posterior mode
/// sits on the boundary.
pub const MIN_CONCENTRATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub shape: f64,
    pub scale: f64,
    /// stop once `max_k |new − old| / old` falls below this
    pub tol: f64,
    pub max_iters: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FixedPointOutcome {
    pub iterations: usize,
    pub converged: bool,
    /// the update was undefined and the value was left unchanged
    pub degenerate: bool,
    /// coordinates parked at [`MIN_CONCENTRATION`]
    pub clamped: usize,
}

/// `tail[j]` = number of counts strictly greater than `j`.
fn tail_counts(counts: impl Iterator<Item = u32>) -> Vec<f64> {
    let mut hist: Vec<u64> = Vec::new();
    for c in counts {
        let c = c as usize;
        if c >= hist.len() {
            hist.resize(c + 1, 0);
        }
        hist[c] += 1;
    }
    let mut tail = vec![0.0; hist.len().saturating_sub(1)];
    let mut acc = 0u64;
    for j in (0..tail.len()).rev() {
        acc += hist[j + 1];
        tail[j] = acc as f64;
    }
    tail
}

#[inline]
fn tail_sum(tail: &[f64], x: f64) -> f64 {
    tail.iter().enumerate().map(|(j, &t)| t / (x + j as f64)).sum()
}

/// Moves `alpha` to the MAP of the Dirichlet-multinomial document likelihood
/// with Gamma hyperpriors, given the doc-topic table `ndk` (`D × K`).
pub fn optimize_alpha(alpha: &mut [f64], ndk: &[u32], fp: &FixedPoint) -> FixedPointOutcome {
    let k = alpha.len();
    let d = if k == 0 { 0 } else { ndk.len() / k };
    let topic_tails: Vec<Vec<f64>> = (0..k)
        .map(|topic| tail_counts((0..d).map(|doc| ndk[doc * k + topic])))
        .collect();
    let len_tail = tail_counts((0..d).map(|doc| ndk[doc * k..(doc + 1) * k].iter().sum()));

    let mut out = FixedPointOutcome::default();
    let mut next = vec![0.0; k];
    for iter in 1..=fp.max_iters {
        out.iterations = iter;
        let a: f64 = alpha.iter().sum();
        let den = tail_sum(&len_tail, a) + 1.0 / fp.scale;
        let mut clamped = 0;
        for topic in 0..k {
            let num = alpha[topic] * tail_sum(&topic_tails[topic], alpha[topic]) + fp.shape - 1.0;
            if num > 0.0 && den > 0.0 {
                next[topic] = (num / den).max(MIN_CONCENTRATION);
            } else {
                next[topic] = MIN_CONCENTRATION;
                clamped += 1;
            }
        }
        if clamped == k {
            warn!("degenerate alpha update (no coordinate has a positive numerator); alpha left unchanged");
            out.degenerate = true;
            return out;
        }
        out.clamped = clamped;
        let change = relative_change(alpha, &next);
        alpha.copy_from_slice(&next);
        if change < fp.tol {
            out.converged = true;
            break;
        }
    }
    if !out.converged {
        warn!("alpha fixed point did not converge in {} iterations", fp.max_iters);
    }
    out
}

/// Moves a symmetric topic-term concentration to its MAP given the topic-term
/// table `nki` (`K × V`) and topic totals `nk`.
pub fn optimize_eta_symmetric(
    eta: f64,
    nki: &[u32],
    nk: &[u32],
    v: usize,
    fp: &FixedPoint,
) -> (f64, FixedPointOutcome) {
    let cell_tail = tail_counts(nki.iter().copied());
    let vf = v as f64;
    let mut out = FixedPointOutcome::default();
    let mut eta = eta;
    for iter in 1..=fp.max_iters {
        out.iterations = iter;
        let num = eta * tail_sum(&cell_tail, eta) + fp.shape - 1.0;
        let den = vf * nk.iter().map(|&n| digamma_diff(vf * eta, n)).sum::<f64>() + 1.0 / fp.scale;
        if !(num > 0.0 && den > 0.0) {
            warn!("degenerate eta update (numerator {num}, denominator {den}); eta left unchanged");
            out.degenerate = true;
            return (eta, out);
        }
        let next = (num / den).max(MIN_CONCENTRATION);
        let change = ((next - eta) / eta).abs();
        eta = next;
        if change < fp.tol {
            out.converged = true;
            break;
        }
    }
    if !out.converged {
        warn!("eta fixed point did not converge in {} iterations", fp.max_iters);
    }
    (eta, out)
}

fn relative_change(old: &[f64], new: &[f64]) -> f64 {
    old.iter()
        .zip(new)
        .map(|(o, n)| ((n - o) / o).abs())
        .fold(0.0, f64::max)
}
