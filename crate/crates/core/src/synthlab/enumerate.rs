use statrs::function::gamma::ln_gamma;

use crate::corpus::BowCorpus;
use crate::error::{Error, Result};
use crate::lda::TopicTermPrior;

pub const MAX_ENUMERATED_STATES: usize = 1_000_000;

/// Exact posterior over topic assignments of a tiny corpus.
///
/// Assignment vectors are indexed in mixed-radix order over the flattened
/// tokens (document-major, each document in `BowDoc::tokens()` order) with
/// the first token as the most significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactPosterior {
    pub k: usize,
    pub doc_lens: Vec<usize>,
    pub probs: Vec<f64>,
}

impl ExactPosterior {
    pub fn index_of(&self, z: &[Vec<u32>]) -> usize {
        z.iter().flatten().fold(0, |acc, &t| acc * self.k + t as usize)
    }

    pub fn assignment(&self, mut index: usize) -> Vec<Vec<u32>> {
        let n: usize = self.doc_lens.iter().sum();
        let mut flat = vec![0u32; n];
        for slot in flat.iter_mut().rev() {
            *slot = (index % self.k) as u32;
            index /= self.k;
        }
        let mut out = Vec::with_capacity(self.doc_lens.len());
        let mut rest = flat.as_slice();
        for &len in &self.doc_lens {
            let (head, tail) = rest.split_at(len);
            out.push(head.to_vec());
            rest = tail;
        }
        out
    }
}

/// Enumerates `p(Z | W, α, η)` ∝ `p(W, Z | α, η)` with Θ and Φ integrated out.
pub fn enumerate_posterior(
    corpus: &BowCorpus,
    k: usize,
    alpha: &[f64],
    eta: &TopicTermPrior,
) -> Result<ExactPosterior> {
    let v = corpus.vocab.len();
    if alpha.len() != k || k == 0 {
        return Err(Error::InvalidInput(format!("need K ≥ 1 and |α| = K, got K={k}, |α|={}", alpha.len())));
    }
    let docs: Vec<Vec<usize>> = corpus.docs.iter().map(|d| d.tokens().map(|t| t as usize).collect()).collect();
    let n: usize = docs.iter().map(Vec::len).sum();
    let states = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(k).filter(|&s| s <= MAX_ENUMERATED_STATES));
    let Some(states) = states else {
        return Err(Error::InvalidInput(format!("{k}^{n} assignments exceed the enumeration limit")));
    };

    // lnΓ(x + c) for every count c that can occur
    let table = |x: f64| -> Vec<f64> { (0..=n).map(|c| ln_gamma(x + c as f64)).collect() };
    let alpha_sum: f64 = alpha.iter().sum();
    let lg_alpha: Vec<Vec<f64>> = alpha.iter().map(|&a| table(a)).collect();
    let lg_alpha_sum = table(alpha_sum);
    let lg_eta: Vec<Vec<Vec<f64>>> = (0..k).map(|t| (0..v).map(|i| table(eta.get(t, i))).collect()).collect();
    let lg_eta_sum: Vec<Vec<f64>> = (0..k).map(|t| table(eta.row_sum(t, v))).collect();

    let flat: Vec<(usize, usize)> = docs.iter().enumerate().flat_map(|(d, ts)| ts.iter().map(move |&t| (d, t))).collect();
    let mut z = vec![0usize; n];
    let mut ndk = vec![0usize; docs.len() * k];
    let mut nki = vec![0usize; k * v];
    let mut nk = vec![0usize; k];
    let mut log_p = Vec::with_capacity(states);
    for s in 0..states {
        let mut rem = s;
        for j in (0..n).rev() {
            z[j] = rem % k;
            rem /= k;
        }
        ndk.iter_mut().for_each(|x| *x = 0);
        nki.iter_mut().for_each(|x| *x = 0);
        nk.iter_mut().for_each(|x| *x = 0);
        for (&(d, term), &topic) in flat.iter().zip(&z) {
            ndk[d * k + topic] += 1;
            nki[topic * v + term] += 1;
            nk[topic] += 1;
        }
        let mut lp = 0.0;
        for (d, doc) in docs.iter().enumerate() {
            lp += lg_alpha_sum[0] - lg_alpha_sum[doc.len()];
            for t in 0..k {
                lp += lg_alpha[t][ndk[d * k + t]] - lg_alpha[t][0];
            }
        }
        for t in 0..k {
            lp += lg_eta_sum[t][0] - lg_eta_sum[t][nk[t]];
            for i in 0..v {
                lp += lg_eta[t][i][nki[t * v + i]] - lg_eta[t][i][0];
            }
        }
        log_p.push(lp);
    }
    let max = log_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut probs: Vec<f64> = log_p.iter().map(|&x| (x - max).exp()).collect();
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(ExactPosterior { k, doc_lens: docs.iter().map(Vec::len).collect(), probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn corpus(docs: &[Vec<u32>], v: usize) -> BowCorpus {
        BowCorpus::from_token_ids(v, docs, &[NaiveDate::from_ymd_opt(2001, 1, 1).unwrap()]).unwrap()
    }

    #[test]
    fn sums_to_one() {
        let c = corpus(&[vec![0, 1, 1, 2], vec![0, 2, 2, 2]], 3);
        let post = enumerate_posterior(&c, 2, &[1.0, 1.0], &TopicTermPrior::Symmetric(1.0)).unwrap();
        assert_eq!(post.probs.len(), 256);
        assert!((post.probs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn invariant_under_relabeling() {
        let c = corpus(&[vec![0, 1, 2], vec![2, 1, 0]], 3);
        let post = enumerate_posterior(&c, 3, &[0.5; 3], &TopicTermPrior::Symmetric(0.3)).unwrap();
        let perm = [2u32, 0, 1];
        for s in 0..post.probs.len() {
            let z = post.assignment(s);
            let permuted: Vec<Vec<u32>> = z.iter().map(|d| d.iter().map(|&t| perm[t as usize]).collect()).collect();
            assert!((post.probs[s] - post.probs[post.index_of(&permuted)]).abs() < 1e-12);
        }
    }

    #[test]
    fn single_token_is_uniform() {
        let c = corpus(&[vec![1]], 3);
        let post = enumerate_posterior(&c, 2, &[1.0, 1.0], &TopicTermPrior::Symmetric(0.7)).unwrap();
        assert!((post.probs[0] - 0.5).abs() < 1e-12 && (post.probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn index_round_trip_and_limit() {
        let c = corpus(&[vec![0, 1], vec![2]], 3);
        let post = enumerate_posterior(&c, 3, &[1.0; 3], &TopicTermPrior::Symmetric(1.0)).unwrap();
        for s in 0..post.probs.len() {
            assert_eq!(post.index_of(&post.assignment(s)), s);
        }
        assert_eq!(post.assignment(1), vec![vec![0, 0], vec![1]]);
        let big = corpus(&[vec![0; 21]], 1);
        assert!(enumerate_posterior(&big, 2, &[1.0, 1.0], &TopicTermPrior::Symmetric(1.0)).is_err());
    }

    #[test]
    fn matches_hand_joint_for_two_tokens() {
        // one doc with tokens (0, 1), K = 2, α = η = 1, V = 2
        // same topic: doc term Γ(2)/Γ(4)·Γ(3)/Γ(1) = 1/3, topic-term Γ(2)/Γ(4)·1·1 = 1/6 → 1/18
        // different topics: doc Γ(2)/Γ(4)·1·1 = 1/6, topic-term (Γ(2)/Γ(3))² = 1/4 → 1/24
        let c = corpus(&[vec![0, 1]], 2);
        let post = enumerate_posterior(&c, 2, &[1.0, 1.0], &TopicTermPrior::Symmetric(1.0)).unwrap();
        let (same, diff) = (1.0 / 18.0, 1.0 / 24.0);
        let z = 2.0 * same + 2.0 * diff;
        assert!((post.probs[0] - same / z).abs() < 1e-12);
        assert!((post.probs[1] - diff / z).abs() < 1e-12);
    }
}
