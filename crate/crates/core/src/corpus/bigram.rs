use std::collections::{BTreeSet, HashMap, HashSet};

/// Separator between the two words of a bigram term.
pub const JOINER: char = '_';

/// Detected collocations, stored as `(first, second)` word pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BigramSet {
    pairs: HashSet<(String, String)>,
}

impl BigramSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, first: &str, second: &str) {
        self.pairs.insert((first.to_string(), second.to_string()));
    }

    pub fn contains(&self, first: &str, second: &str) -> bool {
        // lookups on borrowed pairs would need a custom key type; bigram sets
        // are small enough that the allocation is irrelevant
        self.pairs.contains(&(first.to_string(), second.to_string()))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Joined terms in lexicographic order.
    pub fn terms(&self) -> Vec<String> {
        let set: BTreeSet<String> = self
            .pairs
            .iter()
            .map(|(a, b)| format!("{a}{JOINER}{b}"))
            .collect();
        set.into_iter().collect()
    }
}

impl FromIterator<(String, String)> for BigramSet {
    fn from_iter<I: IntoIterator<Item = (String, String)>>(iter: I) -> Self {
        Self {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// 2×2 contingency counts for one candidate pair over all consecutive pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTable {
    /// first followed by second
    pub both: u64,
    /// first followed by something else
    pub first_only: u64,
    /// second preceded by something else
    pub second_only: u64,
    /// neither
    pub neither: u64,
}

/// Pearson χ² of a 2×2 table, `N(ad − bc)² / ((a+b)(c+d)(a+c)(b+d))`.
/// Returns 0 when a margin is empty.
pub fn chi_square_2x2(t: PairTable) -> f64 {
    let (a, b, c, d) = (
        t.both as f64,
        t.first_only as f64,
        t.second_only as f64,
        t.neither as f64,
    );
    let n = a + b + c + d;
    let denom = (a + b) * (c + d) * (a + c) * (b + d);
    if denom == 0.0 {
        return 0.0;
    }
    let diff = a * d - b * c;
    n * diff * diff / denom
}

/// Pairs of consecutive tokens with at least `min_pair_count` occurrences and
/// χ² strictly above `chi2_threshold`.
pub fn detect_bigrams<S: AsRef<[String]>>(
    streams: &[S],
    min_pair_count: u64,
    chi2_threshold: f64,
) -> BigramSet {
    let mut pair_counts: HashMap<(&str, &str), u64> = HashMap::new();
    let mut first_counts: HashMap<&str, u64> = HashMap::new();
    let mut second_counts: HashMap<&str, u64> = HashMap::new();
    let mut total = 0u64;
    for stream in streams {
        for w in stream.as_ref().windows(2) {
            let (a, b) = (w[0].as_str(), w[1].as_str());
            *pair_counts.entry((a, b)).or_default() += 1;
            *first_counts.entry(a).or_default() += 1;
            *second_counts.entry(b).or_default() += 1;
            total += 1;
        }
    }
    pair_counts
        .iter()
        .filter(|(_, &n)| n >= min_pair_count)
        .filter(|((a, b), &n)| {
            let first_only = first_counts[a] - n;
            let second_only = second_counts[b] - n;
            let table = PairTable {
                both: n,
                first_only,
                second_only,
                neither: total - n - first_only - second_only,
            };
            chi_square_2x2(table) > chi2_threshold
        })
        .map(|((a, b), _)| (a.to_string(), b.to_string()))
        .collect()
}

/// Single greedy left-to-right pass; a merged pair consumes both tokens.
pub fn merge_bigrams(tokens: &[String], bigrams: &BigramSet) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        if i + 1 < tokens.len() && bigrams.contains(&tokens[i], &tokens[i + 1]) {
            out.push(format!("{}{JOINER}{}", tokens[i], tokens[i + 1]));
            i += 2;
        } else {
            out.push(tokens[i].clone());
            i += 1;
        }
    }
    out
}
