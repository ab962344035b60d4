use std::collections::HashSet;

use chrono::NaiveDate;

use super::{Lemmatizer, RawDocument};

/// A paragraph of a raw document; the unit treated as a document by the topic
/// model.
#[derive(Debug, Clone, PartialEq)]
pub struct Paragraph {
    pub parent_id: String,
    pub index: usize,
    pub date: NaiveDate,
    pub text: String,
    pub tokens: Vec<String>,
}

impl Paragraph {
    /// Corpus-level identifier, `<parent_id>#<index>`.
    pub fn doc_id(&self) -> String {
        format!("{}#{}", self.parent_id, self.index)
    }
}

/// Splits on runs of one or more blank (whitespace-only) lines. Single
/// newlines stay inside a paragraph.
pub fn split_paragraphs(doc: &RawDocument) -> Vec<Paragraph> {
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let flush = |current: &mut Vec<&str>, out: &mut Vec<Paragraph>| {
        if current.is_empty() {
            return;
        }
        let text = current.join("\n").trim().to_string();
        current.clear();
        out.push(Paragraph {
            parent_id: doc.id.clone(),
            index: out.len(),
            date: doc.date,
            tokens: tokenize(&text),
            text,
        });
    };
    for line in doc.text.lines() {
        if line.trim().is_empty() {
            flush(&mut current, &mut out);
        } else {
            current.push(line);
        }
    }
    flush(&mut current, &mut out);
    out
}

/// Lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .map(|t| {
            t.to_lowercase()
                .chars()
                .filter(|c| c.is_alphanumeric())
                .collect::<String>()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

/// Drops stopwords, lemmatizes survivors, and drops any lemma that is itself a
/// stopword.
pub fn normalize(
    tokens: &[String],
    stopwords: &HashSet<String>,
    lemmatizer: &dyn Lemmatizer,
) -> Vec<String> {
    tokens
        .iter()
        .filter(|t| !stopwords.contains(t.as_str()))
        .map(|t| lemmatizer.lemmatize(t))
        .filter(|t| !t.is_empty() && !stopwords.contains(t.as_str()))
        .collect()
}
