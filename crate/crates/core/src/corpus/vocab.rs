use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};

/// Ordered term list with per-term document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    pub terms: Vec<String>,
    pub doc_freq: Vec<usize>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn from_parts(terms: Vec<String>, doc_freq: Vec<usize>) -> Result<Self> {
        if terms.len() != doc_freq.len() {
            return Err(Error::InvalidInput("terms and doc_freq lengths differ".into()));
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate vocabulary term `{t}`")));
            }
        }
        Ok(Self { terms, doc_freq, index })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }
}

/// Number of streams each distinct term occurs in.
pub fn document_frequencies<S: AsRef<[String]>>(streams: &[S]) -> BTreeMap<String, usize> {
    let mut df = BTreeMap::new();
    for s in streams {
        let distinct: HashSet<&String> = s.as_ref().iter().collect();
        for t in distinct {
            *df.entry(t.clone()).or_insert(0) += 1;
        }
    }
    df
}

/// Keeps terms found in at least `min_doc_freq` streams, ordered by descending
/// document frequency and then lexicographically.
pub fn build_vocabulary<S: AsRef<[String]>>(streams: &[S], min_doc_freq: usize) -> Result<Vocabulary> {
    let mut kept: Vec<(String, usize)> = document_frequencies(streams)
        .into_iter()
        .filter(|(_, n)| *n >= min_doc_freq)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let (terms, doc_freq) = kept.into_iter().unzip();
    Vocabulary::from_parts(terms, doc_freq)
}
