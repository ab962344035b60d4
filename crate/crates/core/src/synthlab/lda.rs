use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::corpus::{BowCorpus, Quarter};
use crate::error::{Error, Result};
use crate::lda::sample_categorical;

/// Where the planted topics come from.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantedTopics {
    /// Each topic drawn from a symmetric Dirichlet with this concentration.
    Dirichlet(f64),
    /// Explicit `K × V` row-stochastic matrix.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticLdaSpec {
    pub k: usize,
    pub v: usize,
    pub n_docs: usize,
    pub doc_len: usize,
    pub alpha: Vec<f64>,
    pub topics: PlantedTopics,
    /// Dates are assigned so that consecutive runs of this many documents
    /// share a quarter, starting at `start`.
    pub docs_per_quarter: usize,
    pub start: Quarter,
    /// Vocabulary names; `t0, t1, …` when absent.
    pub terms: Option<Vec<String>>,
    pub seed: u64,
}

impl SyntheticLdaSpec {
    /// Block topics: topic `k` puts 90% of its mass evenly on its own block of
    /// `v / k` terms and the rest evenly on the whole vocabulary.
    pub fn well_separated(k: usize, n_docs: usize, doc_len: usize, v: usize, seed: u64) -> Self {
        let block = (v / k).max(1);
        let mut phi = vec![0.1 / v as f64; k * v];
        for topic in 0..k {
            for i in topic * block..((topic + 1) * block).min(v) {
                phi[topic * v + i] += 0.9 / block as f64;
            }
            let row = &mut phi[topic * v..(topic + 1) * v];
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= total);
        }
        Self {
            k,
            v,
            n_docs,
            doc_len,
            alpha: vec![0.1; k],
            topics: PlantedTopics::Fixed(phi),
            docs_per_quarter: 10,
            start: Quarter { year: 1980, q: 1 },
            terms: None,
            seed,
        }
    }
}

/// The parameters a synthetic corpus was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedTruth {
    /// `K × V`
    pub phi: Vec<f64>,
    /// `D × K`
    pub theta: Vec<f64>,
    pub alpha: Vec<f64>,
    pub eta: Option<f64>,
    /// True assignment of every token, aligned with `BowDoc::tokens()`.
    pub z: Vec<Vec<u32>>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: BowCorpus,
    pub truth: PlantedTruth,
}

fn dirichlet<R: Rng + ?Sized>(gammas: &[Gamma<f64>], rng: &mut R, out: &mut [f64]) {
    let mut total = 0.0;
    for (o, g) in out.iter_mut().zip(gammas) {
        *o = g.sample(rng);
        total += *o;
    }
    if total > 0.0 {
        out.iter_mut().for_each(|x| *x /= total);
    } else {
        // every draw underflowed: the limit is a point mass on one coordinate
        let hit = rng.random_range(0..out.len());
        out.iter_mut().enumerate().for_each(|(i, x)| *x = if i == hit { 1.0 } else { 0.0 });
    }
}

fn gammas(params: &[f64]) -> Result<Vec<Gamma<f64>>> {
    params
        .iter()
        .map(|&a| Gamma::new(a, 1.0).map_err(|e| Error::InvalidInput(format!("concentration {a}: {e}"))))
        .collect()
}

/// Ancestral sampling: φ_k ~ Dir(η), θ_d ~ Dir(α), z ~ Cat(θ_d), w ~ Cat(φ_z).
pub fn generate_lda_corpus(spec: &SyntheticLdaSpec) -> Result<SyntheticCorpus> {
    let (k, v) = (spec.k, spec.v);
    if k == 0 || v == 0 || spec.alpha.len() != k || spec.docs_per_quarter == 0 {
        return Err(Error::InvalidInput("synthetic corpus needs K, V, docs_per_quarter ≥ 1 and |α| = K".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (phi, eta) = match &spec.topics {
        PlantedTopics::Dirichlet(eta) => {
            let g = gammas(&vec![*eta; v])?;
            let mut phi = vec![0.0; k * v];
            for row in phi.chunks_mut(v) {
                dirichlet(&g, &mut rng, row);
            }
            (phi, Some(*eta))
        }
        PlantedTopics::Fixed(phi) => {
            if phi.len() != k * v {
                return Err(Error::InvalidInput(format!("planted Φ has {} entries, expected {k}×{v}", phi.len())));
            }
            for row in phi.chunks(v) {
                let s: f64 = row.iter().sum();
                if row.iter().any(|&x| x < 0.0) || (s - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidInput("planted Φ rows must be probability vectors".into()));
                }
            }
            (phi.clone(), None)
        }
    };

    let alpha_g = gammas(&spec.alpha)?;
    let mut theta = vec![0.0; spec.n_docs * k];
    let mut docs = Vec::with_capacity(spec.n_docs);
    let mut assignments = Vec::with_capacity(spec.n_docs);
    for row in theta.chunks_mut(k) {
        dirichlet(&alpha_g, &mut rng, row);
        let mut pairs: Vec<(u32, u32)> = (0..spec.doc_len)
            .map(|_| {
                let topic = sample_categorical(row, 1.0, &mut rng);
                let term = sample_categorical(&phi[topic * v..(topic + 1) * v], 1.0, &mut rng);
                (term as u32, topic as u32)
            })
            .collect();
        // BowDoc stores counts by term, so align z with the sorted token order
        pairs.sort_unstable();
        docs.push(pairs.iter().map(|p| p.0).collect::<Vec<_>>());
        assignments.push(pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    }

    let mut quarter = spec.start;
    let dates: Vec<_> = (0..spec.n_docs.max(1))
        .map(|d| {
            if d > 0 && d % spec.docs_per_quarter == 0 {
                quarter = quarter.next();
            }
            quarter.first_day()
        })
        .collect();
    let mut corpus = BowCorpus::from_token_ids(v, &docs, &dates)?;
    if let Some(terms) = &spec.terms {
        corpus.rename_terms(terms.clone())?;
    }
    Ok(SyntheticCorpus {
        corpus,
        truth: PlantedTruth { phi, theta, alpha: spec.alpha.clone(), eta, z: assignments, seed: spec.seed },
    })
}

/// Total-variation distance between two distributions on the same support.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Greedily pairs rows of `estimated` with rows of `truth` (both `K × V`),
/// smallest total-variation distance first. Returns, for every true topic,
/// the matched estimated topic and its distance.
pub fn greedy_match(truth: &[f64], estimated: &[f64], v: usize) -> Vec<(usize, f64)> {
    let kt = truth.len() / v;
    let ke = estimated.len() / v;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(kt * ke);
    for a in 0..kt {
        for b in 0..ke {
            pairs.push((total_variation(&truth[a * v..(a + 1) * v], &estimated[b * v..(b + 1) * v]), a, b));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut out = vec![(usize::MAX, f64::INFINITY); kt];
    let mut used = vec![false; ke];
    for (dist, a, b) in pairs {
        if out[a].0 == usize::MAX && !used[b] {
            out[a] = (b, dist);
            used[b] = true;
        }
    }
    out
}

/// Topics for a seeding experiment: two near-identical topics that differ
/// only on `n_diff` terms each, plus `n_general` unrelated block topics.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitTopics {
    /// `(n_general + 2) × V`; rows 0 and 1 are the split pair.
    pub phi: Vec<f64>,
    pub v: usize,
    /// Term shared heavily by the split pair.
    pub anchor: usize,
    /// Terms over-represented in row 0.
    pub first_terms: Vec<usize>,
    /// Terms over-represented in row 1.
    pub second_terms: Vec<usize>,
}

pub fn split_topics(n_general: usize, v: usize, n_diff: usize) -> Result<SplitTopics> {
    let shared = 20;
    let general_start = 1 + 2 * n_diff + shared;
    if n_general == 0 || v < general_start + n_general {
        return Err(Error::InvalidInput(format!(
            "vocabulary of {v} terms too small for {n_general} general topics and {n_diff} split terms"
        )));
    }
    let k = n_general + 2;
    let background = 0.02 / v as f64;
    let mut phi = vec![background; k * v];
    let first_terms: Vec<usize> = (1..=n_diff).collect();
    let second_terms: Vec<usize> = (n_diff + 1..=2 * n_diff).collect();
    for (row, own, other) in [(0, &first_terms, &second_terms), (1, &second_terms, &first_terms)] {
        let r = &mut phi[row * v..(row + 1) * v];
        r[0] += 0.2;
        for i in 1 + 2 * n_diff..general_start {
            r[i] += 0.48 / shared as f64;
        }
        for &i in own {
            r[i] += 0.25 / n_diff as f64;
        }
        for &i in other {
            r[i] += 0.05 / n_diff as f64;
        }
    }
    let block = (v - general_start) / n_general;
    for g in 0..n_general {
        let r = &mut phi[(g + 2) * v..(g + 3) * v];
        for i in general_start + g * block..general_start + (g + 1) * block {
            r[i] += 0.98 / block as f64;
        }
    }
    for r in phi.chunks_mut(v) {
        let s: f64 = r.iter().sum();
        r.iter_mut().for_each(|x| *x /= s);
    }
    Ok(SplitTopics { phi, v, anchor: 0, first_terms, second_terms })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dirichlet_spec(k: usize, v: usize, d: usize, len: usize, alpha: f64, seed: u64) -> SyntheticLdaSpec {
        SyntheticLdaSpec {
            k,
            v,
            n_docs: d,
            doc_len: len,
            alpha: vec![alpha; k],
            topics: PlantedTopics::Dirichlet(0.1),
            docs_per_quarter: 4,
            start: Quarter { year: 2000, q: 1 },
            terms: None,
            seed,
        }
    }

    #[test]
    fn vanishing_alpha_gives_single_topic_documents() {
        let out = generate_lda_corpus(&dirichlet_spec(4, 30, 500, 5, 1e-6, 3)).unwrap();
        let concentrated = out.truth.theta.chunks(4).filter(|r| r.iter().cloned().fold(0.0, f64::max) > 0.999).count();
        assert!(concentrated as f64 >= 0.99 * 500.0);
    }

    #[test]
    fn one_topic_frequencies_converge() {
        let out = generate_lda_corpus(&dirichlet_spec(1, 50, 1000, 100, 1.0, 5)).unwrap();
        let mut freq = vec![0.0; 50];
        for d in &out.corpus.docs {
            for &(t, c) in &d.counts {
                freq[t as usize] += c as f64;
            }
        }
        let n: f64 = freq.iter().sum();
        assert_eq!(n, 100_000.0);
        freq.iter_mut().for_each(|x| *x /= n);
        assert!(total_variation(&freq, &out.truth.phi) < 0.02);
    }

    #[test]
    fn reproducible_and_aligned() {
        let spec = dirichlet_spec(3, 20, 30, 12, 0.5, 11);
        let a = generate_lda_corpus(&spec).unwrap();
        let b = generate_lda_corpus(&spec).unwrap();
        assert_eq!(a.corpus, b.corpus);
        assert_eq!(a.truth, b.truth);
        for (doc, z) in a.corpus.docs.iter().zip(&a.truth.z) {
            assert_eq!(doc.tokens().count(), z.len());
        }
        let quarters: Vec<_> = a.corpus.docs.iter().map(|d| d.quarter()).collect();
        assert_eq!(quarters[0], Quarter { year: 2000, q: 1 });
        assert_eq!(quarters[4], Quarter { year: 2000, q: 2 });
        assert_eq!(quarters[29], Quarter { year: 2001, q: 4 });
    }

    #[test]
    fn greedy_matching_recovers_permutation() {
        let truth = [0.7, 0.2, 0.1, 0.1, 0.1, 0.8];
        let est = [0.1, 0.2, 0.7, 0.6, 0.3, 0.1];
        let m = greedy_match(&truth, &est, 3);
        assert_eq!(m[0].0, 1);
        assert_eq!(m[1].0, 0);
        assert!((m[0].1 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn split_pair_differs_only_on_planted_terms() {
        let s = split_topics(3, 120, 5).unwrap();
        let v = s.v;
        for r in s.phi.chunks(v) {
            assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let (a, b) = (&s.phi[..v], &s.phi[v..2 * v]);
        for i in 0..v {
            let planted = s.first_terms.contains(&i) || s.second_terms.contains(&i);
            assert_eq!((a[i] - b[i]).abs() > 1e-12, planted, "term {i}");
        }
    }
}
