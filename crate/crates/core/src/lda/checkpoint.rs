//! Plain-text checkpoint of a fitted model.
//!
//! Floats are written in shortest round-trip form, so a model read back from
//! disk is bit-identical except for θ entries below [`THETA_CUTOFF`], which
//! are not stored; θ rows are renormalized on load.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{LdaConfig, Provenance, TopicModel, TopicTermPrior};
use crate::corpus::{read_file, write_file};
use crate::error::{Error, Result};

pub const THETA_CUTOFF: f64 = 1e-6;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    n_topics: usize,
    n_terms: usize,
    n_docs: usize,
    lda: LdaConfig,
}

pub fn write_checkpoint(dir: &Path, model: &TopicModel) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let cfg = &model.provenance.config;

    let mut phi = String::new();
    for k in 0..model.k {
        write_row(&mut phi, model.phi_row(k));
    }
    write_file(&dir.join("phi.tsv"), &phi)?;

    let mut theta = String::new();
    for d in 0..model.n_docs() {
        for (k, &x) in model.theta_row(d).iter().enumerate() {
            if x >= THETA_CUTOFF {
                writeln!(theta, "{d}\t{k}\t{x}").unwrap();
            }
        }
    }
    write_file(&dir.join("theta.tsv"), &theta)?;

    let mut alpha = String::new();
    write_row(&mut alpha, &model.alpha);
    write_file(&dir.join("alpha.tsv"), &alpha)?;

    write_prior(&dir.join("eta.tsv"), &model.eta)?;

    let header = Header { n_topics: model.k, n_terms: model.v, n_docs: model.n_docs(), lda: cfg.clone() };
    write_file(&dir.join("config.json"), &(serde_json::to_string_pretty(&header).unwrap() + "\n"))?;
    write_file(&dir.join("seed.txt"), &format!("{}\n", cfg.seed))?;
    let p = &model.provenance;
    write_file(
        &dir.join("iters.txt"),
        &format!(
            "total_iters\t{}\nburn_in\t{}\naveraged_from\t{}\naveraged_to\t{}\nn_snapshots\t{}\n",
            cfg.total_iters, cfg.burn_in, p.averaged_from, p.averaged_to, p.n_snapshots
        ),
    )
}

/// Writes a topic-term prior: one scalar line if symmetric, else `K` rows.
pub fn write_prior(path: &Path, prior: &TopicTermPrior) -> Result<()> {
    let mut eta = String::new();
    match prior {
        TopicTermPrior::Symmetric(x) => writeln!(eta, "{x}").unwrap(),
        TopicTermPrior::Matrix { v, values, .. } => values.chunks(*v).for_each(|r| write_row(&mut eta, r)),
    }
    write_file(path, &eta)
}

pub fn read_prior(path: &Path, k: usize, v: usize) -> Result<TopicTermPrior> {
    let text = read_file(path)?;
    if text.lines().filter(|l| !l.trim().is_empty()).count() == 1 && !text.contains('\t') {
        let x = text.trim().parse().map_err(|e| Error::parse(path.display().to_string(), e))?;
        Ok(TopicTermPrior::Symmetric(x))
    } else {
        TopicTermPrior::matrix(k, v, read_matrix(path, k, v)?)
    }
}

pub fn read_checkpoint(dir: &Path) -> Result<TopicModel> {
    let header_path = dir.join("config.json");
    let header: Header = serde_json::from_str(&read_file(&header_path)?)
        .map_err(|e| Error::parse(header_path.display().to_string(), e))?;
    let (k, v, d) = (header.n_topics, header.n_terms, header.n_docs);

    let phi = read_matrix(&dir.join("phi.tsv"), k, v)?;
    let alpha = read_matrix(&dir.join("alpha.tsv"), 1, k)?;

    let eta = read_prior(&dir.join("eta.tsv"), k, v)?;

    let theta_path = dir.join("theta.tsv");
    let mut theta = vec![0.0; d * k];
    for (lineno, line) in read_file(&theta_path)?.lines().enumerate() {
        let ctx = || format!("{}:{}", theta_path.display(), lineno + 1);
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 {
            return Err(Error::parse(ctx(), "expected doc, topic, value"));
        }
        let doc: usize = f[0].parse().map_err(|e| Error::parse(ctx(), e))?;
        let topic: usize = f[1].parse().map_err(|e| Error::parse(ctx(), e))?;
        let x: f64 = f[2].parse().map_err(|e| Error::parse(ctx(), e))?;
        if doc >= d || topic >= k {
            return Err(Error::parse(ctx(), "index out of range"));
        }
        theta[doc * k + topic] = x;
    }
    for (doc, row) in theta.chunks_mut(k).enumerate() {
        let total: f64 = row.iter().sum();
        if !(total > 0.0) {
            return Err(Error::parse(theta_path.display().to_string(), format!("document {doc} has no entries")));
        }
        if total != 1.0 {
            row.iter_mut().for_each(|x| *x /= total);
        }
    }

    let iters_path = dir.join("iters.txt");
    let iters = read_file(&iters_path)?;
    let get = |key: &str| -> Result<usize> {
        iters
            .lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix('\t')))
            .ok_or_else(|| Error::parse(iters_path.display().to_string(), format!("missing {key}")))?
            .trim()
            .parse()
            .map_err(|e| Error::parse(iters_path.display().to_string(), e))
    };
    let provenance = Provenance {
        config: header.lda,
        averaged_from: get("averaged_from")?,
        averaged_to: get("averaged_to")?,
        n_snapshots: get("n_snapshots")?,
    };
    Ok(TopicModel { k, v, phi, theta, alpha, eta, provenance })
}

fn write_row(out: &mut String, row: &[f64]) {
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            out.push('\t');
        }
        write!(out, "{x}").unwrap();
    }
    out.push('\n');
}

fn read_matrix(path: &Path, rows: usize, cols: usize) -> Result<Vec<f64>> {
    let text = read_file(path)?;
    let ctx = path.display().to_string();
    let mut values = Vec::with_capacity(rows * cols);
    let lines: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
    if lines.len() != rows {
        return Err(Error::parse(ctx, format!("expected {rows} rows, found {}", lines.len())));
    }
    for line in lines {
        let before = values.len();
        for field in line.split('\t') {
            values.push(field.parse::<f64>().map_err(|e| Error::parse(ctx.clone(), e))?);
        }
        if values.len() - before != cols {
            return Err(Error::parse(ctx, format!("expected {cols} columns")));
        }
    }
    Ok(values)
}
