use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use taxnews_core::corpus::{PreprocessConfig, Quarter};
use taxnews_core::econometrics::{BootstrapConfig, LpConfig, NewsConfig};
use taxnews_core::lda::LdaConfig;
use taxnews_core::seeding::SeedConfig;
use taxnews_core::synthlab::FixtureSpec;

use crate::error::CliError;

/// Everything a pipeline run reads, one section per stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub paths: Paths,
    pub preprocess: PreprocessConfig,
    pub lda_step1: LdaConfig,
    pub lda_step2: LdaConfig,
    pub seed: SeedConfig,
    pub prevalence: PrevalenceSection,
    pub columns: Columns,
    pub predictive: PredictiveSection,
    pub news: NewsConfig,
    pub lp: LpConfig,
    pub irf: IrfSection,
    pub bootstrap: BootstrapConfig,
    pub simulate: FixtureSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            paths: Paths::default(),
            preprocess: PreprocessConfig::default(),
            lda_step1: LdaConfig::default(),
            lda_step2: LdaConfig { n_topics: 26, ..LdaConfig::default() },
            seed: SeedConfig::default(),
            prevalence: PrevalenceSection::default(),
            columns: Columns::default(),
            predictive: PredictiveSection::default(),
            news: NewsConfig::default(),
            lp: LpConfig::default(),
            irf: IrfSection::default(),
            bootstrap: BootstrapConfig::default(),
            simulate: FixtureSpec::default(),
        }
    }
}

/// Input and output locations. Relative paths are taken from the directory
/// holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub corpus: PathBuf,
    pub series: PathBuf,
    pub output_dir: PathBuf,
    /// Replaces the built-in English stopword list.
    pub stopwords: Option<PathBuf>,
    /// Replace the built-in tax-increase / tax-decrease lexicons.
    pub lexicon_increase: Option<PathBuf>,
    pub lexicon_decrease: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            corpus: "speeches.jsonl".into(),
            series: "series.csv".into(),
            output_dir: "out".into(),
            stopwords: None,
            lexicon_increase: None,
            lexicon_decrease: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrevalenceSection {
    /// Which fitted model to aggregate (1 or 2).
    pub step: u8,
    pub start: Option<Quarter>,
    pub end: Option<Quarter>,
}

impl Default for PrevalenceSection {
    fn default() -> Self {
        Self { step: 2, start: None, end: None }
    }
}

/// Roles of the series columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Columns {
    /// Prevalence columns entering the news regression (the seeded pair).
    pub prev: Vec<String>,
    pub dt_all: Vec<String>,
    pub dt_exo: String,
    /// Columns treated as I(1) by the bootstrap.
    pub integrated: Vec<String>,
}

impl Default for Columns {
    fn default() -> Self {
        Self {
            prev: vec!["topic_0".into(), "topic_1".into()],
            dt_all: vec!["dt_pv".into(), "dt_impl".into()],
            dt_exo: "dt_exo".into(),
            integrated: vec!["gdp".into(), "revenue".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PredictiveSection {
    pub leads: Vec<usize>,
    pub control_lags: usize,
    pub controls: Vec<String>,
}

impl Default for PredictiveSection {
    fn default() -> Self {
        Self { leads: vec![0, 1, 2, 3, 4], control_lags: 12, controls: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IrfSection {
    pub responses: Vec<String>,
    pub controls: Vec<String>,
    /// Names from the IRF estimator registry.
    pub estimators: Vec<String>,
    pub var_lags: usize,
    /// Endogenous regressor of LP-IV, led by `endog_lead`.
    pub endog: String,
    pub endog_lead: usize,
    /// Prevalence lags `0..=instrument_lags` instrument the endogenous series.
    pub instrument_lags: usize,
    /// Rescale every response so this one's trough is −1.
    pub normalize_response: Option<String>,
    /// Block-bootstrap bands for the news local projection.
    pub bootstrap: bool,
}

impl Default for IrfSection {
    fn default() -> Self {
        Self {
            responses: vec!["gdp".into()],
            controls: Vec::new(),
            estimators: vec!["lp".into()],
            var_lags: 12,
            endog: "dt_pv".into(),
            endog_lead: 1,
            instrument_lags: 3,
            normalize_response: None,
            bootstrap: true,
        }
    }
}

/// A loaded config together with the directory relative paths refer to.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.config.paths.output_dir)
    }
}

/// Reads the TOML file, applies `section.key=value` overrides and checks
/// every section.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Loaded, CliError> {
    let (mut table, base) = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Config {
                key: String::new(),
                message: format!("cannot read {}: {e}", p.display()),
            })?;
            let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config {
                key: String::new(),
                message: format!("{}: {}", p.display(), e.message()),
            })?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (table, base)
        }
        None => (toml::Table::new(), PathBuf::from(".")),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let config: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config {
        key: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    validate(&config)?;
    Ok(Loaded { config, base })
}

fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let bad = |message: String| CliError::Config { key: spec.to_string(), message };
    let (key, raw) = spec.split_once('=').ok_or_else(|| bad("expected section.key=value".into()))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad("empty key segment".into()));
    }
    // TOML literal if it parses as one, otherwise a bare string
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut node = table;
    for part in &parts[..parts.len() - 1] {
        node = node
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| bad(format!("`{part}` is not a section")))?;
    }
    node.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

fn check(key: &str, r: taxnews_core::Result<()>) -> Result<(), CliError> {
    r.map_err(|e| CliError::Config { key: key.into(), message: e.to_string() })
}

pub fn validate(c: &RunConfig) -> Result<(), CliError> {
    check("lda_step1", c.lda_step1.validate())?;
    check("lda_step2", c.lda_step2.validate())?;
    if c.lda_step2.n_topics != c.lda_step1.n_topics + 1 {
        return Err(CliError::Config {
            key: "lda_step2.n_topics".into(),
            message: format!("must be lda_step1.n_topics + 1 = {}", c.lda_step1.n_topics + 1),
        });
    }
    check("seed", c.seed.validate())?;
    check("bootstrap", c.bootstrap.validate())?;
    if !matches!(c.prevalence.step, 1 | 2) {
        return Err(CliError::Config { key: "prevalence.step".into(), message: "must be 1 or 2".into() });
    }
    if c.columns.prev.is_empty() || c.columns.dt_all.is_empty() {
        return Err(CliError::Config { key: "columns".into(), message: "prev and dt_all must be nonempty".into() });
    }
    let known = taxnews_core::econometrics::irf_estimator_names();
    if let Some(bad) = c.irf.estimators.iter().find(|e| !known.contains(e)) {
        return Err(CliError::Config {
            key: "irf.estimators".into(),
            message: format!("unknown estimator `{bad}` (available: {})", known.join(", ")),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_published_constants() {
        let c = RunConfig::default();
        assert_eq!((c.lda_step1.n_topics, c.lda_step2.n_topics), (25, 26));
        assert_eq!((c.lda_step1.total_iters, c.lda_step1.burn_in), (15_000, 10_000));
        assert_eq!((c.lda_step1.gamma_shape, c.lda_step1.gamma_scale), (0.01, 100.0));
        assert_eq!((c.seed.m1, c.seed.m2, c.seed.target_sum), (100.0, 0.01, 10_000.0));
        assert_eq!((c.news.p1, c.news.p2, c.news.h), (3, 5, 1));
        assert_eq!((c.lp.y_lags, c.bootstrap.block_length, c.bootstrap.replicates), (12, 12, 1999));
        validate(&c).unwrap();
    }

    #[test]
    fn unknown_key_reports_its_path() {
        let err = load(None, &["lda_step1.n_topicz=3".into()]).unwrap_err();
        match err {
            CliError::Config { key, message } => {
                assert_eq!(key, "lda_step1.n_topicz");
                assert!(message.contains("unknown field"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn overrides_parse_literals_and_strings() {
        let l = load(
            None,
            &[
                "lda_step1.n_topics=4".into(),
                "lda_step2.n_topics=5".into(),
                "paths.output_dir=run one".into(),
                "irf.responses=[\"gdp\", \"revenue\"]".into(),
            ],
        )
        .unwrap();
        assert_eq!(l.config.lda_step2.n_topics, 5);
        assert_eq!(l.config.paths.output_dir, PathBuf::from("run one"));
        assert_eq!(l.config.irf.responses.len(), 2);
    }

    #[test]
    fn topic_counts_must_differ_by_one() {
        let err = load(None, &["lda_step1.n_topics=4".into()]).unwrap_err();
        assert!(matches!(err, CliError::Config { ref key, .. } if key == "lda_step2.n_topics"));
    }

    #[test]
    fn type_errors_carry_the_key() {
        let err = load(None, &["bootstrap.replicates=\"many\"".into()]).unwrap_err();
        assert!(matches!(err, CliError::Config { ref key, .. } if key == "bootstrap.replicates"));
    }
}
