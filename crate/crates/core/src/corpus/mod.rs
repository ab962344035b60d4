//! Ingestion of dated raw texts into a paragraph-level bag-of-words corpus.
//!
//! Order of operations: paragraph split, tokenization, stopword removal,
//! lemmatization, rare-unigram filter, χ² bigram detection and merge, and a
//! final document-frequency filter over all terms.

mod bigram;
mod bow;
mod lemma;
mod quarter;
mod text;
mod vocab;

pub use bigram::{chi_square_2x2, detect_bigrams, merge_bigrams, BigramSet, PairTable, JOINER};
pub use bow::{read_vocabulary, vectorize, BowCorpus, BowDoc, DroppedDoc};
pub(crate) use bow::{read_file, write_file};
pub use lemma::{
    lemmatizer_by_name, lemmatizer_names, IdentityLemmatizer, Lemmatizer, SuffixLemmatizer,
};
pub use quarter::{assign_quarter, Quarter};
pub use text::{normalize, split_paragraphs, tokenize, Paragraph};
pub use vocab::{build_vocabulary, document_frequencies, Vocabulary};

use std::collections::{BTreeSet, HashSet};
use std::io::BufRead;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords_en.txt");

/// One input text with its publication date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub date: NaiveDate,
    #[serde(default)]
    pub title: String,
    pub text: String,
}

/// Reads one [`RawDocument`] per line. Blank lines are skipped; ids must be
/// unique and nonempty.
pub fn read_jsonl(path: &Path) -> Result<Vec<RawDocument>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let ctx = || format!("{}:{}", path.display(), lineno + 1);
        let doc: RawDocument = serde_json::from_str(&line).map_err(|e| Error::parse(ctx(), e))?;
        if doc.id.is_empty() {
            return Err(Error::parse(ctx(), "empty document id"));
        }
        if doc.id.contains(['\t', '\n']) {
            return Err(Error::parse(ctx(), "document id contains a tab or newline"));
        }
        if !seen.insert(doc.id.clone()) {
            return Err(Error::parse(ctx(), format!("duplicate document id `{}`", doc.id)));
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Parses a term list: one term per line, `#` starts a comment, blank lines
/// ignored. Whitespace inside a term is replaced by the bigram joiner so that
/// two-word entries match merged bigram terms.
pub fn parse_term_list(contents: &str) -> Vec<String> {
    contents
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| {
            l.split_whitespace()
                .map(str::to_lowercase)
                .collect::<Vec<_>>()
                .join(&JOINER.to_string())
        })
        .collect()
}

pub fn load_term_list(path: &Path) -> Result<Vec<String>> {
    let contents = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(parse_term_list(&contents))
}

pub fn default_stopwords() -> HashSet<String> {
    parse_term_list(DEFAULT_STOPWORDS).into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PreprocessConfig {
    pub min_doc_freq: usize,
    pub min_pair_count: u64,
    pub chi2_threshold: f64,
    pub lemmatizer: String,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            min_doc_freq: 20,
            min_pair_count: 20,
            chi2_threshold: 10.83,
            lemmatizer: "suffix".to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PreprocessOutput {
    pub corpus: BowCorpus,
    pub bigrams: BigramSet,
    pub dropped: Vec<DroppedDoc>,
}

/// Runs the full ingestion on `docs` with the given stopword set.
pub fn preprocess(
    docs: &[RawDocument],
    stopwords: &HashSet<String>,
    cfg: &PreprocessConfig,
) -> Result<PreprocessOutput> {
    if cfg.min_pair_count == 0 {
        return Err(Error::InvalidInput("min_pair_count must be at least 1".into()));
    }
    let lemmatizer = lemmatizer_by_name(&cfg.lemmatizer)?;

    let paragraphs: Vec<Paragraph> = docs.iter().flat_map(split_paragraphs).collect();
    let mut streams: Vec<Vec<String>> = paragraphs
        .iter()
        .map(|p| normalize(&p.tokens, stopwords, lemmatizer.as_ref()))
        .collect();

    // rare unigrams go before pair counting
    let df = document_frequencies(&streams);
    let keep: HashSet<&str> = df
        .iter()
        .filter(|(_, &n)| n >= cfg.min_doc_freq)
        .map(|(t, _)| t.as_str())
        .collect();
    for s in streams.iter_mut() {
        s.retain(|t| keep.contains(t.as_str()));
    }

    let bigrams = detect_bigrams(&streams, cfg.min_pair_count, cfg.chi2_threshold);
    let merged: Vec<Vec<String>> = streams.iter().map(|s| merge_bigrams(s, &bigrams)).collect();
    let vocab = build_vocabulary(&merged, cfg.min_doc_freq)?;

    let mut out_docs = Vec::with_capacity(paragraphs.len());
    let mut dropped = Vec::new();
    for (p, stream) in paragraphs.iter().zip(&merged) {
        let counts = vectorize(stream, &vocab);
        let id = p.doc_id();
        if counts.is_empty() {
            log::info!("dropping paragraph {id}: no in-vocabulary tokens");
            dropped.push(DroppedDoc { id, date: p.date });
        } else {
            out_docs.push(BowDoc {
                id,
                date: p.date,
                counts,
            });
        }
    }
    log::info!(
        "corpus: {} documents kept, {} dropped, V = {}, {} bigrams",
        out_docs.len(),
        dropped.len(),
        vocab.len(),
        bigrams.len()
    );
    Ok(PreprocessOutput {
        corpus: BowCorpus::new(vocab, out_docs)?,
        bigrams,
        dropped,
    })
}

/// Distinct terms of a term list that are missing from the vocabulary.
pub fn out_of_vocabulary<'a>(terms: &'a [String], vocab: &Vocabulary) -> BTreeSet<&'a str> {
    terms
        .iter()
        .filter(|t| vocab.index_of(t).is_none())
        .map(String::as_str)
        .collect()
}
