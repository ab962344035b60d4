//! Lexicon-seeded priors and the two-step estimation.
//!
//! Step 1 fits an unseeded model. The general tax topic `k*` is the topic with
//! the most mass on the anchor terms. Step 2 replaces it by two topics whose
//! Dirichlet priors are `φ̂_{k*}` tilted towards the increase and decrease
//! lexicons, keeps every other step-1 topic as a scaled prior, and refits with
//! that prior held fixed.

use std::collections::BTreeSet;
use std::path::Path;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::corpus::{load_term_list, parse_term_list, BowCorpus, Vocabulary};
use crate::error::{Error, Result};
use crate::lda::{run_chain, ChainOutput, LdaConfig, TopicModel, TopicTermPrior};

pub const DEFAULT_INCREASE_LEXICON: &str = include_str!("../data/lexicon_tax_increase.txt");
pub const DEFAULT_DECREASE_LEXICON: &str = include_str!("../data/lexicon_tax_decrease.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub name: String,
    pub terms: BTreeSet<String>,
}

impl Lexicon {
    pub fn new(name: impl Into<String>, terms: impl IntoIterator<Item = String>) -> Self {
        Self { name: name.into(), terms: terms.into_iter().collect() }
    }

    pub fn parse(name: impl Into<String>, contents: &str) -> Self {
        Self::new(name, parse_term_list(contents))
    }

    pub fn load(name: impl Into<String>, path: &Path) -> Result<Self> {
        Ok(Self::new(name, load_term_list(path)?))
    }

    pub fn default_increase() -> Self {
        Self::parse("tax_increase", DEFAULT_INCREASE_LEXICON)
    }

    pub fn default_decrease() -> Self {
        Self::parse("tax_decrease", DEFAULT_DECREASE_LEXICON)
    }

    /// Vocabulary ids of the lexicon terms; misses are reported and skipped.
    pub fn resolve(&self, vocab: &Vocabulary) -> ResolvedLexicon {
        let mut ids = Vec::new();
        let mut oov = Vec::new();
        for t in &self.terms {
            match vocab.index_of(t) {
                Some(i) => ids.push(i),
                None => oov.push(t.clone()),
            }
        }
        if !oov.is_empty() {
            info!("lexicon {}: {} of {} terms not in the vocabulary", self.name, oov.len(), self.terms.len());
        }
        ResolvedLexicon { name: self.name.clone(), n_terms: self.terms.len(), ids, oov }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedLexicon {
    pub name: String,
    pub n_terms: usize,
    pub ids: Vec<usize>,
    pub oov: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeedConfig {
    /// Multiplier on own-lexicon terms.
    pub m1: f64,
    /// Multiplier on opposite-lexicon terms.
    pub m2: f64,
    /// Sum of every step-2 prior row (pseudo-token count).
    pub target_sum: f64,
    pub anchors: Vec<String>,
    /// Minimum ratio of the winning topic's anchor mass to the runner-up's.
    pub dominance_floor: f64,
}

impl Default for SeedConfig {
    fn default() -> Self {
        Self { m1: 100.0, m2: 0.01, target_sum: 10_000.0, anchors: vec!["tax".into()], dominance_floor: 10.0 }
    }
}

impl SeedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.m1 > 1.0 && 1.0 > self.m2 && self.m2 > 0.0) {
            return Err(Error::InvalidInput(format!("need m1 > 1 > m2 > 0, got m1={} m2={}", self.m1, self.m2)));
        }
        if !(self.target_sum > 0.0 && self.target_sum.is_finite()) {
            return Err(Error::InvalidInput(format!("target_sum must be positive, got {}", self.target_sum)));
        }
        if self.anchors.is_empty() {
            return Err(Error::InvalidInput("at least one anchor term is required".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicIdentification {
    pub topic: usize,
    /// Summed φ over the anchor terms, per topic.
    pub anchor_mass: Vec<f64>,
    pub runner_up: usize,
    /// Winner's anchor mass over the runner-up's (infinite if the latter is 0).
    pub dominance_ratio: f64,
    pub tied: bool,
    pub anchors_used: Vec<String>,
}

/// Topic with the largest anchor mass; exact ties go to the lowest index.
pub fn identify_topic(model: &TopicModel, vocab: &Vocabulary, anchors: &[String]) -> Result<TopicIdentification> {
    if model.k < 2 {
        return Err(Error::InvalidInput("topic identification needs at least two topics".into()));
    }
    let used: Vec<&String> = anchors.iter().filter(|a| vocab.index_of(a).is_some()).collect();
    if used.is_empty() {
        return Err(Error::InvalidInput(format!("none of the anchor terms [{}] is in the vocabulary", anchors.join(", "))));
    }
    let ids: Vec<usize> = used.iter().filter_map(|a| vocab.index_of(a)).collect();
    let mass: Vec<f64> = (0..model.k).map(|k| ids.iter().map(|&i| model.phi_row(k)[i]).sum()).collect();

    let mut order: Vec<usize> = (0..model.k).collect();
    order.sort_by(|&a, &b| mass[b].total_cmp(&mass[a]).then(a.cmp(&b)));
    let (topic, runner_up) = (order[0], order[1]);
    let tied = mass[topic] == mass[runner_up];
    if tied {
        warn!("anchor mass tied between topics {topic} and {runner_up}; taking {topic}");
    }
    let dominance_ratio = if mass[runner_up] > 0.0 { mass[topic] / mass[runner_up] } else { f64::INFINITY };
    Ok(TopicIdentification {
        topic,
        anchor_mass: mass,
        runner_up,
        dominance_ratio,
        tied,
        anchors_used: used.into_iter().cloned().collect(),
    })
}

fn rescale(mut row: Vec<f64>, target: f64) -> Vec<f64> {
    let s: f64 = row.iter().sum();
    row.iter_mut().for_each(|x| *x *= target / s);
    row
}

/// The seeded pair `(η_inc, η_dec)`: `φ*` multiplied by `m1` on own-lexicon
/// terms and `m2` on the other lexicon's terms, each rescaled to `target_sum`.
pub fn build_seeded_priors(phi_star: &[f64], inc: &[usize], dec: &[usize], cfg: &SeedConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    cfg.validate()?;
    let total: f64 = phi_star.iter().sum();
    if phi_star.is_empty() || phi_star.iter().any(|&p| !(p >= 0.0)) || (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("seed topic must be a probability vector (sum {total})")));
    }
    let v = phi_star.len();
    if let Some(&i) = inc.iter().chain(dec).find(|&&i| i >= v) {
        return Err(Error::InvalidInput(format!("lexicon term id {i} outside a vocabulary of {v}")));
    }
    let dec_set: BTreeSet<usize> = dec.iter().copied().collect();
    let shared: Vec<usize> = inc.iter().copied().filter(|i| dec_set.contains(i)).collect();
    if !shared.is_empty() {
        return Err(Error::InvalidInput(format!("lexicons are not disjoint: term ids {shared:?} are in both")));
    }
    let tilt = |own: &[usize], other: &[usize]| {
        let mut row = phi_star.to_vec();
        own.iter().for_each(|&i| row[i] *= cfg.m1);
        other.iter().for_each(|&i| row[i] *= cfg.m2);
        rescale(row, cfg.target_sum)
    };
    Ok((tilt(inc, dec), tilt(dec, inc)))
}

/// Step-1 topics other than `k*`, in order, each rescaled to `target_sum`.
pub fn carry_over_priors(phi: &[f64], v: usize, k_star: usize, target_sum: f64) -> Vec<Vec<f64>> {
    phi.chunks(v)
        .enumerate()
        .filter(|&(k, _)| k != k_star)
        .map(|(_, row)| rescale(row.to_vec(), target_sum))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedingReport {
    pub identification: TopicIdentification,
    pub lexicons: Vec<ResolvedLexicon>,
    pub config: SeedConfig,
}

/// Step-2 prior matrix: rows 0 and 1 are the seeded increase and decrease
/// topics, then the carried-over step-1 topics.
pub fn seed_step2_prior(
    step1: &TopicModel,
    vocab: &Vocabulary,
    inc: &Lexicon,
    dec: &Lexicon,
    cfg: &SeedConfig,
) -> Result<(TopicTermPrior, SeedingReport)> {
    cfg.validate()?;
    if vocab.len() != step1.v {
        return Err(Error::InvalidInput(format!("vocabulary has {} terms, model has {}", vocab.len(), step1.v)));
    }
    let shared: Vec<&String> = inc.terms.intersection(&dec.terms).collect();
    if !shared.is_empty() {
        return Err(Error::InvalidInput(format!("lexicons are not disjoint: {shared:?}")));
    }
    let ident = identify_topic(step1, vocab, &cfg.anchors)?;
    if ident.dominance_ratio < cfg.dominance_floor {
        return Err(Error::InvalidInput(format!(
            "topic {} holds anchor mass only {:.3}× that of topic {} (floor {})",
            ident.topic, ident.dominance_ratio, ident.runner_up, cfg.dominance_floor
        )));
    }
    let (ri, rd) = (inc.resolve(vocab), dec.resolve(vocab));
    let (eta_inc, eta_dec) = build_seeded_priors(step1.phi_row(ident.topic), &ri.ids, &rd.ids, cfg)?;
    let mut values = eta_inc;
    values.extend(eta_dec);
    for row in carry_over_priors(&step1.phi, step1.v, ident.topic, cfg.target_sum) {
        values.extend(row);
    }
    let prior = TopicTermPrior::matrix(step1.k + 1, step1.v, values)?;
    Ok((prior, SeedingReport { identification: ident, lexicons: vec![ri, rd], config: cfg.clone() }))
}

pub struct TwoStepOutput {
    pub step1: ChainOutput,
    pub step2: ChainOutput,
    pub report: SeedingReport,
}

/// Both estimation steps. `step2` must have one topic more than `step1`.
pub fn run_two_step(
    corpus: &BowCorpus,
    step1: &LdaConfig,
    step2: &LdaConfig,
    inc: &Lexicon,
    dec: &Lexicon,
    seed: &SeedConfig,
) -> Result<TwoStepOutput> {
    if step2.n_topics != step1.n_topics + 1 {
        return Err(Error::InvalidInput(format!(
            "step 2 must use {} topics (one more than step 1), got {}",
            step1.n_topics + 1,
            step2.n_topics
        )));
    }
    let first = run_chain(corpus, step1, None)?;
    let (prior, report) = seed_step2_prior(&first.model, &corpus.vocab, inc, dec, seed)?;
    info!(
        "seeding topic {} (dominance {:.1}× over topic {})",
        report.identification.topic, report.identification.dominance_ratio, report.identification.runner_up
    );
    let second = run_chain(corpus, step2, Some(prior))?;
    Ok(TwoStepOutput { step1: first, step2: second, report })
}
