use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use super::{assign_quarter, Quarter, Vocabulary};
use crate::error::{Error, Result};

/// One document as sorted `(term_id, count)` pairs with positive counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BowDoc {
    pub id: String,
    pub date: NaiveDate,
    pub counts: Vec<(u32, u32)>,
}

impl BowDoc {
    pub fn n_tokens(&self) -> usize {
        self.counts.iter().map(|&(_, c)| c as usize).sum()
    }

    /// Token sequence with each term repeated `count` times, in term-id order.
    pub fn tokens(&self) -> impl Iterator<Item = u32> + '_ {
        self.counts
            .iter()
            .flat_map(|&(t, c)| std::iter::repeat_n(t, c as usize))
    }

    pub fn quarter(&self) -> Quarter {
        assign_quarter(self.date)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedDoc {
    pub id: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BowCorpus {
    pub vocab: Vocabulary,
    pub docs: Vec<BowDoc>,
}

/// Counts in-vocabulary tokens; unknown tokens are dropped.
pub fn vectorize<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> Vec<(u32, u32)> {
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *counts.entry(i as u32).or_insert(0) += 1;
        }
    }
    counts.into_iter().collect()
}

impl BowCorpus {
    pub fn new(vocab: Vocabulary, docs: Vec<BowDoc>) -> Result<Self> {
        let v = vocab.len() as u32;
        for d in &docs {
            let mut prev = None;
            for &(t, c) in &d.counts {
                if t >= v {
                    return Err(Error::InvalidInput(format!(
                        "document {} references term {t} outside vocabulary of size {v}",
                        d.id
                    )));
                }
                if c == 0 {
                    return Err(Error::InvalidInput(format!("document {} has a zero count", d.id)));
                }
                if prev.is_some_and(|p| p >= t) {
                    return Err(Error::InvalidInput(format!(
                        "document {} counts are not strictly sorted by term",
                        d.id
                    )));
                }
                prev = Some(t);
            }
        }
        Ok(Self { vocab, docs })
    }

    /// Builds a corpus from integer token sequences over a vocabulary of
    /// generic names `t0, t1, …`. Empty documents are kept.
    pub fn from_token_ids(v: usize, docs: &[Vec<u32>], dates: &[NaiveDate]) -> Result<Self> {
        let terms: Vec<String> = (0..v).map(|i| format!("t{i}")).collect();
        let mut df = vec![0usize; v];
        let mut out = Vec::with_capacity(docs.len());
        for (d, toks) in docs.iter().enumerate() {
            let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
            for &t in toks {
                *counts.entry(t).or_insert(0) += 1;
            }
            for &t in counts.keys() {
                if let Some(slot) = df.get_mut(t as usize) {
                    *slot += 1;
                }
            }
            out.push(BowDoc {
                id: format!("doc{d}"),
                date: dates[d % dates.len().max(1)],
                counts: counts.into_iter().collect(),
            });
        }
        Self::new(Vocabulary::from_parts(terms, df)?, out)
    }

    /// Replaces the term names, keeping ids and document frequencies.
    pub fn rename_terms(&mut self, terms: Vec<String>) -> Result<()> {
        if terms.len() != self.vocab.len() {
            return Err(Error::InvalidInput(format!(
                "{} names for a vocabulary of {} terms",
                terms.len(),
                self.vocab.len()
            )));
        }
        self.vocab = Vocabulary::from_parts(terms, std::mem::take(&mut self.vocab.doc_freq))?;
        Ok(())
    }

    pub fn n_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn total_tokens(&self) -> usize {
        self.docs.iter().map(BowDoc::n_tokens).sum()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.docs.iter().map(|d| d.date).collect()
    }

    /// Writes `vocab.tsv`, `corpus.tsv` and `meta.tsv` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut vocab = String::new();
        for (i, (t, df)) in self.vocab.terms.iter().zip(&self.vocab.doc_freq).enumerate() {
            let _ = writeln!(vocab, "{i}\t{t}\t{df}");
        }
        let mut triplets = String::new();
        let mut meta = String::new();
        for d in &self.docs {
            for &(t, c) in &d.counts {
                let _ = writeln!(triplets, "{}\t{t}\t{c}", d.id);
            }
            let _ = writeln!(meta, "{}\t{}\t{}", d.id, d.date, d.n_tokens());
        }
        write_file(&dir.join("vocab.tsv"), &vocab)?;
        write_file(&dir.join("corpus.tsv"), &triplets)?;
        write_file(&dir.join("meta.tsv"), &meta)
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let vocab = read_vocabulary(&dir.join("vocab.tsv"))?;
        let meta_path = dir.join("meta.tsv");
        let meta = read_file(&meta_path)?;
        let mut docs = Vec::new();
        let mut position = std::collections::HashMap::new();
        let mut expected_tokens = Vec::new();
        for (n, line) in meta.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let ctx = || format!("{}:{}", meta_path.display(), n + 1);
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Error::parse(ctx(), "expected doc_id, date, n_tokens"));
            }
            let date: NaiveDate = f[1].parse().map_err(|e| Error::parse(ctx(), e))?;
            let n_tokens: usize = f[2].parse().map_err(|e| Error::parse(ctx(), e))?;
            if position.insert(f[0].to_string(), docs.len()).is_some() {
                return Err(Error::parse(ctx(), format!("duplicate doc id `{}`", f[0])));
            }
            docs.push(BowDoc {
                id: f[0].to_string(),
                date,
                counts: Vec::new(),
            });
            expected_tokens.push(n_tokens);
        }
        let corpus_path = dir.join("corpus.tsv");
        let triplets = read_file(&corpus_path)?;
        for (n, line) in triplets.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
            let ctx = || format!("{}:{}", corpus_path.display(), n + 1);
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 3 {
                return Err(Error::parse(ctx(), "expected doc_id, term_id, count"));
            }
            let &d = position
                .get(f[0])
                .ok_or_else(|| Error::parse(ctx(), format!("unknown doc id `{}`", f[0])))?;
            let t: u32 = f[1].parse().map_err(|e| Error::parse(ctx(), e))?;
            let c: u32 = f[2].parse().map_err(|e| Error::parse(ctx(), e))?;
            docs[d].counts.push((t, c));
        }
        for (d, expected) in docs.iter_mut().zip(expected_tokens) {
            d.counts.sort_unstable();
            if d.n_tokens() != expected {
                return Err(Error::parse(
                    meta_path.display().to_string(),
                    format!("doc {} declares {expected} tokens but has {}", d.id, d.n_tokens()),
                ));
            }
        }
        Self::new(vocab, docs)
    }
}

pub fn read_vocabulary(path: &Path) -> Result<Vocabulary> {
    let text = read_file(path)?;
    let mut terms = Vec::new();
    let mut df = Vec::new();
    for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.is_empty()) {
        let ctx = || format!("{}:{}", path.display(), n + 1);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(ctx(), "expected term_id, term, doc_freq"));
        }
        let id: usize = f[0].parse().map_err(|e| Error::parse(ctx(), e))?;
        if id != terms.len() {
            return Err(Error::parse(ctx(), "term ids must be consecutive from 0"));
        }
        terms.push(f[1].to_string());
        df.push(f[2].parse().map_err(|e| Error::parse(ctx(), e))?);
    }
    Vocabulary::from_parts(terms, df)
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::from_parts(vec!["tax".into(), "cut".into()], vec![3, 2]).unwrap()
    }

    #[test]
    fn vectorize_examples() {
        let v = vocab();
        assert_eq!(vectorize(&["tax", "tax", "cut"], &v), [(0, 2), (1, 1)]);
        assert!(vectorize(&["school", "road"], &v).is_empty());
        let toks = ["tax", "road", "cut", "cut"];
        let total: u32 = vectorize(&toks, &v).iter().map(|&(_, c)| c).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn rejects_out_of_range_terms() {
        let doc = BowDoc {
            id: "d".into(),
            date: NaiveDate::from_ymd_opt(2000, 1, 1).unwrap(),
            counts: vec![(5, 1)],
        };
        assert!(BowCorpus::new(vocab(), vec![doc]).is_err());
    }

    #[test]
    fn files_round_trip() {
        let date = NaiveDate::from_ymd_opt(1981, 8, 13).unwrap();
        let docs = vec![
            BowDoc { id: "a#0".into(), date, counts: vec![(0, 2), (1, 1)] },
            BowDoc { id: "a#1".into(), date, counts: vec![(1, 4)] },
        ];
        let corpus = BowCorpus::new(vocab(), docs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        corpus.write_dir(dir.path()).unwrap();
        let back = BowCorpus::read_dir(dir.path()).unwrap();
        assert_eq!(back, corpus);
        let meta = std::fs::read_to_string(dir.path().join("meta.tsv")).unwrap();
        assert_eq!(meta, "a#0\t1981-08-13\t3\na#1\t1981-08-13\t4\n");
    }
}
