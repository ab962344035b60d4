use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::TopicTermPrior;
use crate::corpus::BowCorpus;
use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Topic assignments of every token plus the count tables of the collapsed
/// sampler. The tables are kept consistent with `z` at all times.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState {
    pub k: usize,
    pub v: usize,
    /// term id of every token, per document
    pub docs: Vec<Vec<u32>>,
    /// topic of every token, per document
    pub z: Vec<Vec<u32>>,
    /// `D × K` tokens of document d assigned to topic k
    pub ndk: Vec<u32>,
    /// `K × V` tokens of term i assigned to topic k
    pub nki: Vec<u32>,
    /// tokens assigned to topic k
    pub nk: Vec<u32>,
    pub alpha: Vec<f64>,
    pub eta: TopicTermPrior,
}

impl GibbsState {
    /// Builds the tables from explicit assignments.
    pub fn from_assignments(
        k: usize,
        v: usize,
        docs: Vec<Vec<u32>>,
        z: Vec<Vec<u32>>,
        alpha: Vec<f64>,
        eta: TopicTermPrior,
    ) -> Result<Self> {
        if alpha.len() != k {
            return Err(Error::InvalidInput(format!("alpha has length {}, expected {k}", alpha.len())));
        }
        if let TopicTermPrior::Matrix { k: pk, v: pv, .. } = &eta {
            if (*pk, *pv) != (k, v) {
                return Err(Error::InvalidInput(format!(
                    "prior matrix is {pk}×{pv}, model is {k}×{v}"
                )));
            }
        }
        if docs.len() != z.len() || docs.iter().zip(&z).any(|(d, zd)| d.len() != zd.len()) {
            return Err(Error::InvalidInput("assignments do not match documents".into()));
        }
        let mut s = Self {
            k,
            v,
            ndk: vec![0; docs.len() * k],
            nki: vec![0; k * v],
            nk: vec![0; k],
            docs,
            z,
            alpha,
            eta,
        };
        for d in 0..s.docs.len() {
            for n in 0..s.docs[d].len() {
                let (term, topic) = (s.docs[d][n] as usize, s.z[d][n] as usize);
                if term >= v || topic >= k {
                    return Err(Error::InvalidInput(format!(
                        "token ({d},{n}) has term {term} / topic {topic} out of range"
                    )));
                }
                s.add(d, term, topic);
            }
        }
        Ok(s)
    }

    /// Random start: θ_d ~ Dir(α) and z_{d,n} ~ Cat(θ_d).
    pub fn initialize<R: Rng + ?Sized>(
        corpus: &BowCorpus,
        k: usize,
        alpha: Vec<f64>,
        eta: TopicTermPrior,
        rng: &mut R,
    ) -> Result<Self> {
        let v = corpus.vocab.len();
        let docs: Vec<Vec<u32>> = corpus.docs.iter().map(|d| d.tokens().collect()).collect();
        let gammas = alpha
            .iter()
            .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::InvalidInput(format!("alpha: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let mut theta = vec![0.0; k];
        let z = docs
            .iter()
            .map(|toks| {
                for (t, g) in theta.iter_mut().zip(&gammas) {
                    *t = g.sample(rng);
                }
                let total: f64 = theta.iter().sum();
                toks.iter()
                    .map(|_| {
                        if total > 0.0 {
                            sample_categorical(&theta, total, rng) as u32
                        } else {
                            rng.random_range(0..k as u32)
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_assignments(k, v, docs, z, alpha, eta)
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn doc_len(&self, d: usize) -> usize {
        self.docs[d].len()
    }

    #[inline]
    fn add(&mut self, d: usize, term: usize, topic: usize) {
        self.ndk[d * self.k + topic] += 1;
        self.nki[topic * self.v + term] += 1;
        self.nk[topic] += 1;
    }

    #[inline]
    fn remove(&mut self, d: usize, term: usize, topic: usize) {
        self.ndk[d * self.k + topic] -= 1;
        self.nki[topic * self.v + term] -= 1;
        self.nk[topic] -= 1;
    }

    /// Unnormalized full conditional of a token of `term` in document `d`,
    /// computed from the current tables (the token itself must already be
    /// removed):
    ///
    /// `(N_dk + α_k) (N_ki + η_ki) / (N_k + Σ_j η_kj)`
    #[inline]
    pub fn conditional_weights(&self, d: usize, term: usize, out: &mut [f64]) {
        let ndk = &self.ndk[d * self.k..(d + 1) * self.k];
        for (topic, w) in out.iter_mut().enumerate() {
            let num = self.nki[topic * self.v + term] as f64 + self.eta.get(topic, term);
            let den = self.nk[topic] as f64 + self.eta.row_sum(topic, self.v);
            *w = (ndk[topic] as f64 + self.alpha[topic]) * num / den;
        }
    }

    /// Conditional weights for token `(d, n)` with its own assignment
    /// excluded from the counts; the state is not modified.
    pub fn token_conditional(&self, d: usize, n: usize) -> Vec<f64> {
        let term = self.docs[d][n] as usize;
        let own = self.z[d][n] as usize;
        (0..self.k)
            .map(|topic| {
                let minus = u32::from(topic == own) as f64;
                let ndk = self.ndk[d * self.k + topic] as f64 - minus;
                let nki = self.nki[topic * self.v + term] as f64 - minus;
                let nk = self.nk[topic] as f64 - minus;
                (ndk + self.alpha[topic]) * (nki + self.eta.get(topic, term))
                    / (nk + self.eta.row_sum(topic, self.v))
            })
            .collect()
    }

    /// Resamples every token once in document, then token, order.
    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        let mut weights = vec![0.0; self.k];
        for d in 0..self.docs.len() {
            for n in 0..self.docs[d].len() {
                let term = self.docs[d][n] as usize;
                let old = self.z[d][n] as usize;
                self.remove(d, term, old);
                self.conditional_weights(d, term, &mut weights);
                let total: f64 = weights.iter().sum();
                let new = sample_categorical(&weights, total, rng);
                self.z[d][n] = new as u32;
                self.add(d, term, new);
            }
        }
    }

    /// Recomputes the tables from `z` and compares them with the maintained
    /// ones.
    pub fn check_consistency(&self) -> Result<()> {
        let fresh = Self::from_assignments(
            self.k,
            self.v,
            self.docs.clone(),
            self.z.clone(),
            self.alpha.clone(),
            self.eta.clone(),
        )?;
        if fresh.ndk != self.ndk || fresh.nki != self.nki || fresh.nk != self.nk {
            return Err(Error::Numerical("count tables out of sync with assignments".into()));
        }
        Ok(())
    }

    /// Posterior mean of θ given the current assignments,
    /// `(N_dk + α_k) / (N_d + Σα)`.
    pub fn estimate_theta(&self) -> Vec<f64> {
        let alpha_sum: f64 = self.alpha.iter().sum();
        let mut theta = vec![0.0; self.ndk.len()];
        for d in 0..self.docs.len() {
            let denom = self.docs[d].len() as f64 + alpha_sum;
            for k in 0..self.k {
                theta[d * self.k + k] = (self.ndk[d * self.k + k] as f64 + self.alpha[k]) / denom;
            }
        }
        theta
    }

    /// Posterior mean of Φ given the current assignments,
    /// `(N_ki + η_ki) / (N_k + Σ_i η_ki)`.
    pub fn estimate_phi(&self) -> Vec<f64> {
        let mut phi = vec![0.0; self.nki.len()];
        for k in 0..self.k {
            let denom = self.nk[k] as f64 + self.eta.row_sum(k, self.v);
            for i in 0..self.v {
                phi[k * self.v + i] = (self.nki[k * self.v + i] as f64 + self.eta.get(k, i)) / denom;
            }
        }
        phi
    }

    /// Collapsed log joint `log p(W, Z | α, η)`.
    pub fn log_joint(&self) -> f64 {
        let alpha_sum: f64 = self.alpha.iter().sum();
        let lg_alpha: Vec<f64> = self.alpha.iter().map(|&a| ln_gamma(a)).collect();
        let mut total = 0.0;
        for d in 0..self.docs.len() {
            total += ln_gamma(alpha_sum) - ln_gamma(self.docs[d].len() as f64 + alpha_sum);
            for k in 0..self.k {
                let n = self.ndk[d * self.k + k];
                if n > 0 {
                    total += ln_gamma(n as f64 + self.alpha[k]) - lg_alpha[k];
                }
            }
        }
        for k in 0..self.k {
            let h = self.eta.row_sum(k, self.v);
            total += ln_gamma(h) - ln_gamma(self.nk[k] as f64 + h);
            for i in 0..self.v {
                let n = self.nki[k * self.v + i];
                if n > 0 {
                    let e = self.eta.get(k, i);
                    total += ln_gamma(n as f64 + e) - ln_gamma(e);
                }
            }
        }
        total
    }
}

/// Cumulative-sum inversion with a single uniform draw.
#[inline]
pub(crate) fn sample_categorical<R: Rng + ?Sized>(weights: &[f64], total: f64, rng: &mut R) -> usize {
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// topic 1: N_dk=2, N_ki=3, N_k=10; topic 2: N_dk=0, N_ki=1, N_k=5; V=4.
    fn hand_state() -> GibbsState {
        // doc 0 holds two tokens of topic 0 (terms 1, 2); doc 1 holds the rest.
        let docs = vec![
            vec![1, 2],
            vec![0, 0, 0, 2, 2, 3, 3, 3, 0, 1, 1, 3, 3],
        ];
        let z = vec![
            vec![0, 0],
            vec![0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1],
        ];
        GibbsState::from_assignments(2, 4, docs, z, vec![1.0, 1.0], TopicTermPrior::Symmetric(0.5)).unwrap()
    }

    #[test]
    fn conditional_matches_hand_evaluation() {
        let s = hand_state();
        assert_eq!(s.ndk[0..2], [2, 0]);
        assert_eq!(s.nk, [10, 5]);
        assert_eq!(s.nki[0], 3);
        assert_eq!(s.nki[4], 1);
        let mut w = [0.0; 2];
        s.conditional_weights(0, 0, &mut w);
        // (2+1)(3+0.5)/(10+2) and (0+1)(1+0.5)/(5+2)
        assert!((w[0] - 0.875).abs() < 1e-12);
        assert!((w[1] - 1.5 / 7.0).abs() < 1e-12);
        let p0 = w[0] / (w[0] + w[1]);
        assert!((p0 - 0.803).abs() < 5e-4);
    }

    #[test]
    fn symmetric_counts_give_uniform_conditional() {
        let docs = vec![vec![0, 1, 0, 1]];
        let z = vec![vec![0, 1, 1, 0]];
        let s = GibbsState::from_assignments(2, 2, docs, z, vec![0.3, 0.3], TopicTermPrior::Symmetric(0.1)).unwrap();
        let mut w = [0.0; 2];
        s.conditional_weights(0, 0, &mut w);
        assert!((w[0] / (w[0] + w[1]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn token_conditional_equals_remove_then_weigh() {
        let s = hand_state();
        for n in 0..s.docs[1].len() {
            let via_api = s.token_conditional(1, n);
            let mut manual = s.clone();
            let (term, topic) = (manual.docs[1][n] as usize, manual.z[1][n] as usize);
            manual.remove(1, term, topic);
            let mut w = vec![0.0; 2];
            manual.conditional_weights(1, term, &mut w);
            assert_eq!(via_api, w);
        }
    }

    #[test]
    fn increasing_doc_topic_count_never_lowers_weight() {
        let mut s = hand_state();
        let mut before = [0.0; 2];
        s.conditional_weights(0, 3, &mut before);
        s.ndk[1] += 3;
        let mut after = [0.0; 2];
        s.conditional_weights(0, 3, &mut after);
        assert!(after[1] >= before[1]);
        assert_eq!(after[0], before[0]);
    }

    #[test]
    fn sweep_preserves_tables_and_is_deterministic() {
        let s0 = hand_state();
        let mut a = s0.clone();
        let mut b = s0.clone();
        let mut ra = ChaCha8Rng::seed_from_u64(7);
        let mut rb = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            a.sweep(&mut ra);
            b.sweep(&mut rb);
            a.check_consistency().unwrap();
            for d in 0..a.n_docs() {
                let row: u32 = a.ndk[d * 2..d * 2 + 2].iter().sum();
                assert_eq!(row as usize, a.doc_len(d));
            }
            for k in 0..2 {
                let row: u32 = a.nki[k * 4..k * 4 + 4].iter().sum();
                assert_eq!(row, a.nk[k]);
            }
        }
        assert_eq!(a.z, b.z);
    }

    #[test]
    fn theta_estimates() {
        let docs = vec![vec![0, 0, 1, 1], vec![0, 0, 0, 0], vec![]];
        let z = vec![vec![0, 1, 0, 1], vec![0, 0, 0, 0], vec![]];
        let s = GibbsState::from_assignments(2, 2, docs, z, vec![1.0, 1.0], TopicTermPrior::Symmetric(1.0)).unwrap();
        let th = s.estimate_theta();
        assert!((th[0] - 0.5).abs() < 1e-15 && (th[1] - 0.5).abs() < 1e-15);
        assert!((th[2] - 5.0 / 6.0).abs() < 1e-15 && (th[3] - 1.0 / 6.0).abs() < 1e-15);
        assert!((th[4] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phi_estimates() {
        // topic 1 empty -> prior mean; topic 0 holds terms (0,1,2) once each
        let docs = vec![vec![0, 1, 2]];
        let z = vec![vec![0, 0, 0]];
        let eta = TopicTermPrior::matrix(2, 3, vec![1.0, 1.0, 1.0, 2.0, 1.0, 1.0]).unwrap();
        let s = GibbsState::from_assignments(2, 3, docs, z, vec![1.0, 1.0], eta).unwrap();
        let phi = s.estimate_phi();
        for i in 0..3 {
            assert!((phi[i] - 1.0 / 3.0).abs() < 1e-15);
        }
        assert_eq!(&phi[3..], &[0.5, 0.25, 0.25]);

        // hand arithmetic with symmetric η = 0.5, V = 4 on the hand fixture
        let s = hand_state();
        let phi = s.estimate_phi();
        // topic 0 term 0: (3 + .5)/(10 + 2); topic 1 term 3: (N_13 + .5)/(5 + 2)
        assert!((phi[0] - 3.5 / 12.0).abs() < 1e-15);
        assert!((phi[4 + 3] - (s.nki[4 + 3] as f64 + 0.5) / 7.0).abs() < 1e-15);
        for k in 0..2 {
            let sum: f64 = phi[k * 4..k * 4 + 4].iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_alpha_rejected() {
        let r = GibbsState::from_assignments(2, 2, vec![vec![0]], vec![vec![0]], vec![1.0], TopicTermPrior::Symmetric(1.0));
        assert!(r.is_err());
    }
}
