//! Text-derived tax news measures.
//!
//! The crate covers the whole path from dated raw texts to impulse responses:
//!
//! * [`corpus`] turns speeches into paragraph-level bag-of-words documents,
//! * [`lda`] fits LDA with a collapsed Gibbs sampler and Gamma-prior
//!   hyperparameter updates,
//! * [`seeding`] builds lexicon-seeded priors and runs the two-step estimation,
//! * [`prevalence`] aggregates document mixtures into quarterly series,
//! * [`econometrics`] holds the regression machinery (noisy news construction,
//!   local projections, LP-IV, VARs, block bootstrap),
//! * [`synthlab`] provides generators and brute-force oracles.

pub mod corpus;
pub mod econometrics;
pub mod error;
pub mod lda;
pub mod prevalence;
pub mod seeding;
pub mod special;
pub mod synthlab;

pub use error::{Error, Result};
