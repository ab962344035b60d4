//! Quarterly topic prevalence and MAP token labels.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use chrono::NaiveDate;

use crate::corpus::{assign_quarter, Quarter};
use crate::econometrics::{format_value, TsFrame};
use crate::error::{Error, Result};

/// Per-quarter mean document mixture. Quarters without documents are kept
/// as explicit gaps (NaN values, zero count).
#[derive(Debug, Clone, PartialEq)]
pub struct PrevalenceSeries {
    pub k: usize,
    pub quarters: Vec<Quarter>,
    /// `quarters.len() × k`, row-major.
    pub values: Vec<f64>,
    pub doc_counts: Vec<usize>,
}

impl PrevalenceSeries {
    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.k..(t + 1) * self.k]
    }

    pub fn topic(&self, k: usize) -> Vec<f64> {
        (0..self.quarters.len()).map(|t| self.values[t * self.k + k]).collect()
    }

    pub fn column_name(k: usize) -> String {
        format!("topic_{k}")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("quarter");
        for k in 0..self.k {
            write!(out, ",{}", Self::column_name(k)).unwrap();
        }
        out.push_str(",n_docs\n");
        for (t, q) in self.quarters.iter().enumerate() {
            write!(out, "{q}").unwrap();
            for &x in self.row(t) {
                write!(out, ",{}", format_value(x)).unwrap();
            }
            writeln!(out, ",{}", self.doc_counts[t]).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Topic columns as stationary series of a frame, plus `n_docs`.
    pub fn to_frame(&self) -> Result<TsFrame> {
        let mut frame = TsFrame::new(self.quarters.clone())?;
        for k in 0..self.k {
            frame.push(Self::column_name(k), self.topic(k), false)?;
        }
        frame.push("n_docs", self.doc_counts.iter().map(|&c| c as f64).collect(), false)?;
        Ok(frame)
    }
}

/// Unweighted mean of `θ_d` over the documents dated in each quarter.
///
/// The index runs from the first to the last quarter with a document unless
/// `span` widens or narrows it; documents outside the span are ignored.
pub fn prevalence(theta: &[f64], k: usize, dates: &[NaiveDate], span: Option<(Quarter, Quarter)>) -> Result<PrevalenceSeries> {
    if k == 0 || theta.len() != dates.len() * k {
        return Err(Error::InvalidInput(format!(
            "theta has {} entries for {} documents and {k} topics",
            theta.len(),
            dates.len()
        )));
    }
    let mut sums: BTreeMap<Quarter, (Vec<f64>, usize)> = BTreeMap::new();
    for (d, date) in dates.iter().enumerate() {
        let entry = sums.entry(assign_quarter(*date)).or_insert_with(|| (vec![0.0; k], 0));
        for (acc, &x) in entry.0.iter_mut().zip(&theta[d * k..(d + 1) * k]) {
            *acc += x;
        }
        entry.1 += 1;
    }
    let (first, last) = match span {
        Some(s) => s,
        None => match (sums.keys().next(), sums.keys().next_back()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return Err(Error::InvalidInput("no documents to aggregate".into())),
        },
    };
    if first > last {
        return Err(Error::InvalidInput(format!("empty quarter span {first}..{last}")));
    }
    let quarters = Quarter::range(first, last);
    let mut values = Vec::with_capacity(quarters.len() * k);
    let mut doc_counts = Vec::with_capacity(quarters.len());
    for q in &quarters {
        match sums.get(q) {
            Some((s, n)) => {
                values.extend(s.iter().map(|x| x / *n as f64));
                doc_counts.push(*n);
            }
            None => {
                values.extend(std::iter::repeat_n(f64::NAN, k));
                doc_counts.push(0);
            }
        }
    }
    Ok(PrevalenceSeries { k, quarters, values, doc_counts })
}

/// `argmax_k θ_{d,k} φ_{k,i}` per token, lowest index on ties; `None` for
/// tokens outside the vocabulary.
pub fn map_token_labels(theta_d: &[f64], phi: &[f64], v: usize, tokens: &[Option<usize>]) -> Vec<Option<usize>> {
    tokens
        .iter()
        .map(|tok| {
            let i = (*tok).filter(|&i| i < v)?;
            let mut best = 0;
            let mut best_w = f64::NEG_INFINITY;
            for (k, &t) in theta_d.iter().enumerate() {
                let w = t * phi[k * v + i];
                if w > best_w {
                    best = k;
                    best_w = w;
                }
            }
            Some(best)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, 15).unwrap()
    }

    #[test]
    fn average_within_quarter() {
        let theta = [1.0, 0.0, 0.5, 0.5, 0.2, 0.8];
        let p = prevalence(&theta, 2, &[d(2000, 1), d(2000, 3), d(2000, 10)], None).unwrap();
        assert_eq!(p.quarters.len(), 4);
        assert!((p.row(0)[0] - 0.75).abs() < 1e-15);
        assert_eq!(p.doc_counts, vec![2, 0, 0, 1]);
        assert!(p.row(1).iter().all(|x| x.is_nan()));
        for t in [0, 3] {
            assert!((p.row(t).iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_mixtures() {
        let k = 5;
        let theta = vec![1.0 / k as f64; 4 * k];
        let dates = [d(1990, 2), d(1990, 5), d(1990, 6), d(1991, 1)];
        let p = prevalence(&theta, k, &dates, None).unwrap();
        for t in 0..p.quarters.len() {
            if p.doc_counts[t] > 0 {
                assert!(p.row(t).iter().all(|&x| (x - 0.2).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn order_and_permutation_invariance() {
        let theta = [0.1, 0.2, 0.7, 0.6, 0.3, 0.1, 0.3, 0.3, 0.4];
        let dates = [d(2001, 1), d(2001, 2), d(2001, 4)];
        let p = prevalence(&theta, 3, &dates, None).unwrap();
        let rev: Vec<f64> = [2, 1, 0].iter().flat_map(|&i| theta[i * 3..i * 3 + 3].to_vec()).collect();
        let q = prevalence(&rev, 3, &[dates[2], dates[1], dates[0]], None).unwrap();
        for (a, b) in p.values.iter().zip(&q.values) {
            assert!((a - b).abs() < 1e-15);
        }
        let perm: Vec<f64> = theta.chunks(3).flat_map(|r| [r[2], r[0], r[1]]).collect();
        let r = prevalence(&perm, 3, &dates, None).unwrap();
        for t in 0..p.quarters.len() {
            assert!((r.row(t)[0] - p.row(t)[2]).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_layout() {
        let p = prevalence(&[0.25, 0.75], 2, &[d(1999, 12)], Some((Quarter::new(1999, 3).unwrap(), Quarter::new(1999, 4).unwrap()))).unwrap();
        assert_eq!(p.to_csv(), "quarter,topic_0,topic_1,n_docs\n1999Q3,,,0\n1999Q4,0.25,0.75,1\n");
    }

    #[test]
    fn map_labels() {
        assert_eq!(map_token_labels(&[0.8, 0.2], &[0.1, 0.5], 1, &[Some(0)]), vec![Some(1)]);
        assert_eq!(map_token_labels(&[0.9, 0.1], &[0.1, 0.9], 1, &[Some(0)]), vec![Some(0)]);
        let labels = map_token_labels(&[0.0, 1.0, 0.0], &[0.5, 0.5, 0.3, 0.7, 0.2, 0.8], 2, &[Some(0), Some(1), None, Some(9)]);
        assert_eq!(labels, vec![Some(1), Some(1), None, None]);
    }
}
