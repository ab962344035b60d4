//! Synthetic data with known ground truth: LDA corpora, exact posteriors of
//! tiny corpora, VAR processes with analytic impulse responses, and a small
//! text-plus-series fixture for end-to-end runs.

mod enumerate;
mod fixture;
mod lda;
mod var;

pub use enumerate::{enumerate_posterior, ExactPosterior, MAX_ENUMERATED_STATES};
pub use fixture::{generate_fixture, Fixture, FixtureSpec};
pub use lda::{
    generate_lda_corpus, greedy_match, split_topics, total_variation, PlantedTopics, PlantedTruth,
    SplitTopics, SyntheticCorpus, SyntheticLdaSpec,
};
pub use var::{simulate_var, var_irf_analytic, VarSimulation};
