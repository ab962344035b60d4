use std::collections::HashMap;

use crate::error::{Error, Result};

/// Maps a lowercase word to its root form.
pub trait Lemmatizer: Send + Sync {
    fn name(&self) -> &'static str;
    fn lemmatize(&self, word: &str) -> String;
}

type Factory = fn() -> Box<dyn Lemmatizer>;

const REGISTRY: &[(&str, Factory)] = &[
    ("suffix", || Box::new(SuffixLemmatizer::default())),
    ("identity", || Box::new(IdentityLemmatizer)),
];

pub fn lemmatizer_names() -> Vec<String> {
    REGISTRY.iter().map(|(n, _)| n.to_string()).collect()
}

pub fn lemmatizer_by_name(name: &str) -> Result<Box<dyn Lemmatizer>> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, make)| make())
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "lemmatizer",
            name: name.to_string(),
            available: lemmatizer_names(),
        })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityLemmatizer;

impl Lemmatizer for IdentityLemmatizer {
    fn name(&self) -> &'static str {
        "identity"
    }

    fn lemmatize(&self, word: &str) -> String {
        word.to_string()
    }
}

/// Rule-based English suffix stripper.
///
/// Plural nouns are singularized (`-ies`, `-es`, `-s`) and regular verb forms
/// reduced (`-ed`, `-ing`), with a silent-`e` restoration heuristic and an
/// exception table for irregular or misleading forms. It is deliberately
/// small; it never touches words of three letters or fewer.
#[derive(Debug, Clone)]
pub struct SuffixLemmatizer {
    exceptions: HashMap<&'static str, &'static str>,
}

const EXCEPTIONS: &[(&str, &str)] = &[
    ("children", "child"),
    ("men", "man"),
    ("women", "woman"),
    ("people", "people"),
    ("taxes", "tax"),
    ("news", "news"),
    ("series", "series"),
    ("always", "always"),
    ("perhaps", "perhaps"),
    ("united", "united"),
    ("states", "state"),
    ("making", "make"),
    ("taking", "take"),
    ("having", "have"),
    ("giving", "give"),
    ("living", "live"),
    ("coming", "come"),
    ("being", "be"),
    ("during", "during"),
    ("nothing", "nothing"),
    ("something", "something"),
    ("everything", "everything"),
    ("anything", "anything"),
    ("morning", "morning"),
    ("evening", "evening"),
    ("spring", "spring"),
    ("thing", "thing"),
    ("things", "thing"),
    ("bring", "bring"),
    ("king", "king"),
    ("ring", "ring"),
    ("string", "string"),
    ("hundred", "hundred"),
    ("indeed", "indeed"),
    ("need", "need"),
    ("speed", "speed"),
    ("feed", "feed"),
    ("seed", "seed"),
    ("red", "red"),
    ("shed", "shed"),
    ("bed", "bed"),
    ("led", "lead"),
    ("fed", "fed"),
    ("does", "do"),
    ("goes", "go"),
    ("crisis", "crisis"),
    ("basis", "basis"),
    ("analysis", "analysis"),
    ("economics", "economics"),
    ("politics", "politics"),
    ("physics", "physics"),
    ("congress", "congress"),
    ("business", "business"),
    ("focused", "focus"),
    ("bias", "bias"),
    ("gas", "gas"),
    ("lives", "life"),
    ("wives", "wife"),
    ("knives", "knife"),
    ("halves", "half"),
    ("selves", "self"),
];

impl Default for SuffixLemmatizer {
    fn default() -> Self {
        Self {
            exceptions: EXCEPTIONS.iter().copied().collect(),
        }
    }
}

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

/// Whether a stem left after removing `-ed`/`-ing` probably lost a silent `e`.
fn needs_silent_e(stem: &[u8]) -> bool {
    let n = stem.len();
    if n < 2 {
        return false;
    }
    let last = stem[n - 1];
    let prev = stem[n - 2];
    match last {
        // reduc(e), produc(e), balanc(e), improv(e), realiz(e)
        b'c' | b'v' | b'z' => true,
        // propos(e), rais(e), increas(e), ris(e); not pass, focus
        b's' => is_vowel(prev) && prev != b'u',
        // stimulat(e), creat(e), execut(e)
        b't' => prev == b'a' || prev == b'u',
        // secur(e), ensur(e), requir(e)
        b'r' => prev == b'u' || (prev == b'i' && n >= 3 && is_vowel(stem[n - 3])),
        // enabl(e), doubl(e), simpl(e)
        b'l' => matches!(prev, b'b' | b'p' | b't' | b'd' | b'g' | b'k' | b'c'),
        // combin(e), determin(e), examin(e)
        b'n' => prev == b'i' && n >= 4,
        // chang(e), challeng(e), arrang(e)
        b'g' => prev == b'n' && n >= 3 && (stem[n - 3] == b'a' || stem[n - 3] == b'e'),
        b'u' => prev == b'g' || prev == b'l',
        _ => false,
    }
}

fn strip_verb_suffix(word: &str, suffix: &str) -> Option<String> {
    let stem = word.strip_suffix(suffix)?;
    let bytes = stem.as_bytes();
    if bytes.len() < 3 || !bytes.iter().any(|&c| is_vowel(c) || c == b'y') {
        return None;
    }
    let n = bytes.len();
    let last = bytes[n - 1];
    if last == bytes[n - 2] && !is_vowel(last) && !matches!(last, b'l' | b's' | b'z' | b'f') {
        // stopped -> stop, cutting -> cut
        return Some(stem[..n - 1].to_string());
    }
    if needs_silent_e(bytes) {
        return Some(format!("{stem}e"));
    }
    Some(stem.to_string())
}

impl Lemmatizer for SuffixLemmatizer {
    fn name(&self) -> &'static str {
        "suffix"
    }

    fn lemmatize(&self, word: &str) -> String {
        if let Some(&lemma) = self.exceptions.get(word) {
            return lemma.to_string();
        }
        if word.len() <= 3 || !word.is_ascii() || word.bytes().any(|c| c.is_ascii_digit()) {
            return word.to_string();
        }
        if let Some(stem) = word.strip_suffix("ies") {
            if stem.len() >= 2 {
                return format!("{stem}y");
            }
        }
        if let Some(stem) = word.strip_suffix("ied") {
            if stem.len() >= 2 {
                return format!("{stem}y");
            }
        }
        if word.ends_with("eed") {
            return word.to_string();
        }
        if word.ends_with("ed") {
            if let Some(s) = strip_verb_suffix(word, "ed") {
                return s;
            }
            return word.to_string();
        }
        if word.ends_with("ing") {
            if let Some(s) = strip_verb_suffix(word, "ing") {
                return s;
            }
            return word.to_string();
        }
        for sibilant in ["sses", "shes", "ches", "xes", "zzes"] {
            if word.ends_with(sibilant) {
                return word[..word.len() - 2].to_string();
            }
        }
        if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
            return word[..word.len() - 1].to_string();
        }
        word.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lem(w: &str) -> String {
        SuffixLemmatizer::default().lemmatize(w)
    }

    #[test]
    fn plurals() {
        assert_eq!(lem("taxes"), "tax");
        assert_eq!(lem("policies"), "policy");
        assert_eq!(lem("incentives"), "incentive");
        assert_eq!(lem("increases"), "increase");
        assert_eq!(lem("businesses"), "business");
        assert_eq!(lem("churches"), "church");
        assert_eq!(lem("boxes"), "box");
        assert_eq!(lem("jobs"), "job");
        assert_eq!(lem("business"), "business");
        assert_eq!(lem("bonus"), "bonus");
    }

    #[test]
    fn verbs() {
        assert_eq!(lem("implemented"), "implement");
        assert_eq!(lem("implements"), "implement");
        assert_eq!(lem("proposed"), "propose");
        assert_eq!(lem("raised"), "raise");
        assert_eq!(lem("rising"), "rise");
        assert_eq!(lem("reduced"), "reduce");
        assert_eq!(lem("balanced"), "balance");
        assert_eq!(lem("spending"), "spend");
        assert_eq!(lem("cutting"), "cut");
        assert_eq!(lem("stimulating"), "stimulate");
        assert_eq!(lem("created"), "create");
        assert_eq!(lem("lowered"), "lower");
        assert_eq!(lem("passed"), "pass");
        assert_eq!(lem("imposed"), "impose");
        assert_eq!(lem("strengthening"), "strengthen");
        assert_eq!(lem("boosted"), "boost");
    }

    #[test]
    fn short_and_exceptional_words_untouched() {
        for w in ["tax", "cut", "was", "red", "need", "1981", "bus", "crisis", "news"] {
            assert_eq!(lem(w), w);
        }
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(lemmatizer_by_name("suffix").unwrap().name(), "suffix");
        assert_eq!(lemmatizer_by_name("identity").unwrap().lemmatize("taxes"), "taxes");
        let err = lemmatizer_by_name("porter").err().unwrap().to_string();
        assert!(err.contains("suffix") && err.contains("identity"));
    }
}
