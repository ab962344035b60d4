use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;
use sha2::{Digest, Sha256};
use taxnews_core::corpus::{self, load_term_list, read_jsonl, BowCorpus};
use taxnews_core::econometrics::{
    build_news, irf_estimator, lp_controls, lp_iv, mbb_pipeline_ci, predictive_f, trough_normalization, Design,
    FirstStage, IrfRequest, IrfResult, NewsInputs, NewsSeries, PredictiveTable, TsFrame,
};
use taxnews_core::lda::{read_checkpoint, read_prior, run_chain, write_checkpoint, write_prior, ChainOutput};
use taxnews_core::prevalence::prevalence;
use taxnews_core::seeding::{seed_step2_prior, Lexicon};
use taxnews_core::synthlab::generate_fixture;

use crate::config::{Loaded, RunConfig};
use crate::error::CliError;

type Result<T> = std::result::Result<T, CliError>;

#[derive(Serialize)]
struct FileHash {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    tool_version: &'a str,
    seed: Option<u64>,
    config: &'a RunConfig,
    inputs: Vec<FileHash>,
    outputs: Vec<FileHash>,
}

/// Tracks what a command reads and writes so its manifest can hash both.
pub struct Run<'a> {
    pub loaded: &'a Loaded,
    pub out: PathBuf,
    command: &'static str,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
}

impl<'a> Run<'a> {
    pub fn new(loaded: &'a Loaded, command: &'static str) -> Self {
        Self { loaded, out: loaded.output_dir(), command, inputs: Vec::new(), outputs: Vec::new() }
    }

    fn cfg(&self) -> &RunConfig {
        &self.loaded.config
    }

    fn require(&mut self, path: PathBuf, artifact: &'static str, produced_by: &'static str) -> Result<PathBuf> {
        if !path.exists() {
            return Err(CliError::MissingArtifact { artifact, path, produced_by });
        }
        self.inputs.push(path.clone());
        Ok(path)
    }

    fn input(&mut self, path: PathBuf, artifact: &'static str) -> Result<PathBuf> {
        self.require(path, artifact, "a user-supplied input")
    }

    fn write(&mut self, path: PathBuf, contents: &str) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.outputs.push(path);
        Ok(())
    }

    fn written(&mut self, dir: &Path, names: &[&str]) {
        self.outputs.extend(names.iter().map(|n| dir.join(n)));
    }

    pub fn finish(self, seed: Option<u64>) -> Result<()> {
        let hash_all = |paths: &[PathBuf]| -> Result<Vec<FileHash>> {
            paths
                .iter()
                .map(|p| {
                    let bytes = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
                    let shown = p.strip_prefix(&self.out).unwrap_or(p);
                    Ok(FileHash { path: shown.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) })
                })
                .collect()
        };
        let manifest = Manifest {
            command: self.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            seed,
            config: &self.loaded.config,
            inputs: hash_all(&self.inputs)?,
            outputs: hash_all(&self.outputs)?,
        };
        let path = self.out.join("manifests").join(format!("{}.json", self.command));
        let dir = path.parent().unwrap();
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

const CHECKPOINT_FILES: &[&str] = &["phi.tsv", "theta.tsv", "alpha.tsv", "eta.tsv", "config.json", "seed.txt", "iters.txt"];

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn read_corpus(run: &mut Run) -> Result<BowCorpus> {
    let dir = run.out.join("preprocess");
    for f in ["vocab.tsv", "corpus.tsv", "meta.tsv"] {
        run.require(dir.join(f), "preprocessed corpus", "preprocess")?;
    }
    Ok(BowCorpus::read_dir(&dir)?)
}

pub fn preprocess(run: &mut Run) -> Result<()> {
    let cfg = run.cfg().clone();
    let docs_path = run.input(run.loaded.resolve(&cfg.paths.corpus), "corpus")?;
    let docs = read_jsonl(&docs_path)?;
    let stopwords: HashSet<String> = match &cfg.paths.stopwords {
        Some(p) => load_term_list(&run.input(run.loaded.resolve(p), "stopword list")?)?.into_iter().collect(),
        None => corpus::default_stopwords(),
    };
    let out = corpus::preprocess(&docs, &stopwords, &cfg.preprocess)?;
    let dir = run.out.join("preprocess");
    out.corpus.write_dir(&dir)?;
    run.written(&dir, &["vocab.tsv", "corpus.tsv", "meta.tsv"]);
    run.write(dir.join("bigrams.txt"), &out.bigrams.terms().iter().map(|t| format!("{t}\n")).collect::<String>())?;
    let dropped: String = out.dropped.iter().map(|d| format!("{}\t{}\n", d.id, d.date)).collect();
    run.write(dir.join("dropped.tsv"), &dropped)?;
    info!("{} documents, {} terms", out.corpus.n_docs(), out.corpus.vocab.len());
    Ok(())
}

fn write_chain(run: &mut Run, dir: PathBuf, chain: &ChainOutput) -> Result<()> {
    write_checkpoint(&dir, &chain.model)?;
    run.written(&dir, CHECKPOINT_FILES);
    let mut trace = String::from("sweep\tlog_joint\talpha_sum\teta\n");
    for r in &chain.trace {
        let eta = r.eta.map(|e| e.to_string()).unwrap_or_default();
        writeln!(trace, "{}\t{}\t{}\t{eta}", r.sweep, r.log_joint, r.alpha_sum).unwrap();
    }
    run.write(dir.join("trace.tsv"), &trace)
}

pub fn lda_step1(run: &mut Run) -> Result<()> {
    let corpus = read_corpus(run)?;
    let cfg = run.cfg().lda_step1.clone();
    let chain = run_chain(&corpus, &cfg, None)?;
    write_chain(run, run.out.join("step1"), &chain)
}

fn lexicons(run: &mut Run) -> Result<(Lexicon, Lexicon)> {
    let paths = run.cfg().paths.clone();
    let inc = match &paths.lexicon_increase {
        Some(p) => Lexicon::load("tax_increase", &run.input(run.loaded.resolve(p), "lexicon")?)?,
        None => Lexicon::default_increase(),
    };
    let dec = match &paths.lexicon_decrease {
        Some(p) => Lexicon::load("tax_decrease", &run.input(run.loaded.resolve(p), "lexicon")?)?,
        None => Lexicon::default_decrease(),
    };
    Ok((inc, dec))
}

pub fn seed(run: &mut Run) -> Result<()> {
    let corpus = read_corpus(run)?;
    let step1_dir = run.out.join("step1");
    run.require(step1_dir.join("config.json"), "step-1 checkpoint", "lda-step1")?;
    let model = read_checkpoint(&step1_dir)?;
    let (inc, dec) = lexicons(run)?;
    let (prior, report) = seed_step2_prior(&model, &corpus.vocab, &inc, &dec, &run.cfg().seed)?;
    let dir = run.out.join("seed");
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    write_prior(&dir.join("prior.tsv"), &prior)?;
    run.written(&dir, &["prior.tsv"]);
    run.write(dir.join("report.json"), &json(&report))
}

pub fn lda_step2(run: &mut Run) -> Result<()> {
    let corpus = read_corpus(run)?;
    let cfg = run.cfg().lda_step2.clone();
    let path = run.require(run.out.join("seed").join("prior.tsv"), "seeded prior", "seed")?;
    let prior = read_prior(&path, cfg.n_topics, corpus.vocab.len())?;
    let chain = run_chain(&corpus, &cfg, Some(prior))?;
    write_chain(run, run.out.join("step2"), &chain)
}

pub fn prevalence_cmd(run: &mut Run) -> Result<()> {
    let corpus = read_corpus(run)?;
    let section = run.cfg().prevalence.clone();
    let (dir, producer) = if section.step == 1 { ("step1", "lda-step1") } else { ("step2", "lda-step2") };
    let dir = run.out.join(dir);
    run.require(dir.join("config.json"), "topic model checkpoint", producer)?;
    let model = read_checkpoint(&dir)?;
    if model.n_docs() != corpus.n_docs() {
        return Err(CliError::Core(taxnews_core::Error::InvalidInput(format!(
            "checkpoint has {} documents, corpus has {}",
            model.n_docs(),
            corpus.n_docs()
        ))));
    }
    let span = match (section.start, section.end) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => {
            return Err(CliError::Config { key: "prevalence".into(), message: "set both start and end, or neither".into() })
        }
    };
    let series = prevalence(&model.theta, model.k, &corpus.dates(), span)?;
    run.write(run.out.join("prevalence.csv"), &series.to_csv())
}

fn read_series(run: &mut Run) -> Result<TsFrame> {
    let path = run.input(run.loaded.resolve(&run.cfg().paths.series), "series CSV")?;
    Ok(TsFrame::read_csv(&path)?)
}

/// Series plus the configured prevalence columns, on the series index.
fn series_with_prevalence(run: &mut Run) -> Result<TsFrame> {
    let mut frame = read_series(run)?;
    let path = run.require(run.out.join("prevalence.csv"), "prevalence CSV", "prevalence")?;
    let prev = TsFrame::read_csv(&path)?;
    let names: Vec<&str> = run.cfg().columns.prev.iter().map(String::as_str).collect();
    frame.merge(&prev, &names)?;
    Ok(frame)
}

fn news_from_frame(frame: &TsFrame, cfg: &RunConfig) -> taxnews_core::Result<NewsSeries> {
    let prev: Vec<(&str, &[f64])> =
        cfg.columns.prev.iter().map(|n| Ok((n.as_str(), frame.column(n)?))).collect::<taxnews_core::Result<_>>()?;
    let dt_all: Vec<(&str, &[f64])> =
        cfg.columns.dt_all.iter().map(|n| Ok((n.as_str(), frame.column(n)?))).collect::<taxnews_core::Result<_>>()?;
    let inputs = NewsInputs { prev: &prev, dt_all: &dt_all, dt_exo: frame.column(&cfg.columns.dt_exo)? };
    build_news(&inputs, &cfg.news)
}

fn news_column(cfg: &RunConfig) -> String {
    format!("news_h{}", cfg.news.h)
}

#[derive(Serialize)]
struct NewsReport<'a> {
    column: String,
    config: &'a taxnews_core::econometrics::NewsConfig,
    n_events: usize,
    n_obs: usize,
    coefficients: &'a [taxnews_core::econometrics::NewsCoefficient],
    /// Marginal predictive F-tests of the prevalence block for the exogenous
    /// tax change, one per lead.
    predictive: PredictiveTable,
}

pub fn news(run: &mut Run) -> Result<()> {
    let frame = series_with_prevalence(run)?;
    let cfg = run.cfg().clone();
    let series = news_from_frame(&frame, &cfg)?;

    let z: Vec<(&str, &[f64])> = cfg.columns.prev.iter().map(|n| Ok((n.as_str(), frame.column(n)?))).collect::<taxnews_core::Result<_>>()?;
    let controls: Vec<(&str, &[f64])> =
        cfg.predictive.controls.iter().map(|n| Ok((n.as_str(), frame.column(n)?))).collect::<taxnews_core::Result<_>>()?;
    let predictive = predictive_f(frame.column(&cfg.columns.dt_exo)?, &z, &controls, &cfg.predictive.leads, cfg.predictive.control_lags)?;

    let mut out = TsFrame::new(frame.index.clone())?;
    out.push(news_column(&cfg), series.values.clone(), false)?;
    run.write(run.out.join("news.csv"), &out.to_csv_string())?;
    let report = NewsReport {
        column: news_column(&cfg),
        config: &cfg.news,
        n_events: series.n_events,
        n_obs: series.regression.rows.len(),
        coefficients: &series.beta,
        predictive,
    };
    run.write(run.out.join("news_report.json"), &json(&report))
}

#[derive(Serialize)]
struct IrfEntry {
    estimator: String,
    response: String,
    file: String,
    n_obs: Vec<usize>,
    bootstrap: bool,
    normalization: Option<f64>,
    first_stage: Option<Vec<FirstStage>>,
}

pub fn lp(run: &mut Run) -> Result<()> {
    let news_path = run.require(run.out.join("news.csv"), "news CSV", "news")?;
    let mut frame = series_with_prevalence(run)?;
    let cfg = run.cfg().clone();
    let news_frame = TsFrame::read_csv(&news_path)?;
    let shock = news_column(&cfg);
    let base = frame.clone();
    frame.merge(&news_frame, &[shock.as_str()])?;

    let mut boot_frame = base;
    boot_frame.set_integrated(&cfg.columns.integrated)?;

    let mut entries = Vec::new();
    for est_name in &cfg.irf.estimators {
        let estimator = irf_estimator(est_name)?;
        let request = |f: &TsFrame, response: &str| -> taxnews_core::Result<IrfResult> {
            let req = IrfRequest {
                frame: f,
                response,
                shock: if est_name == "lp_iv" { &cfg.irf.endog } else { &shock },
                controls: &cfg.irf.controls,
                instruments: &cfg.columns.prev,
                instrument_lags: cfg.irf.instrument_lags,
                endog_lead: cfg.irf.endog_lead,
                var_lags: cfg.irf.var_lags,
                lp: &cfg.lp,
            };
            estimator.estimate(&req)
        };
        let mut results = Vec::new();
        for response in &cfg.irf.responses {
            let bootstrap = cfg.irf.bootstrap && est_name == "lp";
            let irf = if bootstrap {
                let pipeline = |sample: &TsFrame| -> taxnews_core::Result<IrfResult> {
                    let news = news_from_frame(sample, &cfg)?;
                    let mut g = sample.clone();
                    g.push(shock.clone(), news.values, false)?;
                    request(&g, response)
                };
                mbb_pipeline_ci(&boot_frame, pipeline, &cfg.bootstrap)?
            } else {
                let r = request(&frame, response)?;
                if r.se.is_some() { r.with_normal_bands(&cfg.bootstrap.levels) } else { r }
            };
            let first_stage = if est_name == "lp_iv" { Some(first_stage(&frame, response, &cfg)?) } else { None };
            results.push((response.clone(), irf, bootstrap, first_stage));
        }
        let factor = match &cfg.irf.normalize_response {
            Some(name) => {
                let reference = results.iter().find(|(r, ..)| r == name).ok_or_else(|| CliError::Config {
                    key: "irf.normalize_response".into(),
                    message: format!("`{name}` is not among irf.responses"),
                })?;
                Some(trough_normalization(&reference.1)?)
            }
            None => None,
        };
        for (response, mut irf, bootstrap, first_stage) in results {
            if let Some(f) = factor {
                irf.scale(f);
            }
            let file = format!("{est_name}_{response}.csv");
            run.write(run.out.join("irf").join(&file), &irf.to_csv())?;
            entries.push(IrfEntry {
                estimator: est_name.clone(),
                response,
                file,
                n_obs: irf.n_obs.clone(),
                bootstrap,
                normalization: factor,
                first_stage,
            });
        }
    }
    run.write(run.out.join("irf").join("report.json"), &json(&entries))
}

fn first_stage(frame: &TsFrame, response: &str, cfg: &RunConfig) -> taxnews_core::Result<Vec<FirstStage>> {
    let y = frame.column(response)?;
    let controls: Vec<(&str, &[f64])> =
        cfg.irf.controls.iter().map(|n| Ok((n.as_str(), frame.column(n)?))).collect::<taxnews_core::Result<_>>()?;
    let mut inst = Design::new();
    for n in &cfg.columns.prev {
        inst.lags(n, frame.column(n)?, 0..=cfg.irf.instrument_lags);
    }
    let leads = taxnews_core::econometrics::leads(y, cfg.lp.h_max);
    let out = lp_iv(&leads, frame.column(&cfg.irf.endog)?, cfg.irf.endog_lead, &inst, &lp_controls(y, &controls, &cfg.lp), &cfg.lp)?;
    Ok(out.first_stage)
}

pub fn simulate(run: &mut Run) -> Result<()> {
    let fixture = generate_fixture(&run.cfg().simulate)?;
    let dir = run.out.join("simulate");
    run.write(dir.join("speeches.jsonl"), &fixture.to_jsonl())?;
    run.write(dir.join("series.csv"), &fixture.series.to_csv_string())
}
