use serde::{Deserialize, Serialize};

use super::design::{regress, Design, Regression};
use super::frame::shift;
use crate::error::{Error, Result};

/// Residuals of each series after regressing it on lags `1..=lags` of every
/// control (plus an intercept if requested), on the rows selected by `mask`.
/// Residuals are NaN outside the estimation sample.
pub fn project_out(
    series: &[&[f64]],
    controls: &[(&str, &[f64])],
    lags: usize,
    intercept: bool,
    mask: Option<&[bool]>,
    min_extra_rows: usize,
) -> Result<Vec<Vec<f64>>> {
    if lags == 0 {
        return Err(Error::InvalidInput("projection needs at least one control lag".into()));
    }
    series
        .iter()
        .map(|y| {
            let design = control_design(y.len(), controls, 1..=lags, intercept);
            let r = regress(y, &design, mask, min_extra_rows, "projection on past tax changes")?;
            Ok(r.residual_series(y.len()))
        })
        .collect()
}

fn control_design(
    n: usize,
    controls: &[(&str, &[f64])],
    lags: impl Iterator<Item = usize> + Clone,
    intercept: bool,
) -> Design {
    let mut d = Design::new();
    if intercept {
        d.intercept(n);
    }
    for (name, x) in controls {
        d.lags(name, x, lags.clone());
    }
    d
}

/// How the fitted news combination is dated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NewsTiming {
    /// `News_t = Σ_j β_j' Prev⊥_{t−j−h}`: the series at `t` is built from
    /// prevalence observed `h` quarters earlier.
    #[default]
    Lagged,
    /// `News_t = Σ_j β_j' Prev⊥_{t−j}`: the series at `t` forecasts the
    /// enacted change at `t + h`.
    Forecast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewsConfig {
    /// Forecast horizon of the enacted change.
    pub h: usize,
    /// Prevalence lags `0..=p1` in the news regression.
    pub p1: usize,
    /// Tax-change lags `0..=p2` in the news regression.
    pub p2: usize,
    /// Tax-change lags `1..=proj_lags` projected out of the inputs.
    pub proj_lags: usize,
    pub intercept: bool,
    /// Estimate only on quarters with a nonzero exogenous change.
    pub event_mask: bool,
    /// Masked regressions need at least this many rows beyond the regressor
    /// count.
    pub min_extra_rows: usize,
    pub timing: NewsTiming,
}

impl Default for NewsConfig {
    fn default() -> Self {
        Self { h: 1, p1: 3, p2: 5, proj_lags: 6, intercept: true, event_mask: true, min_extra_rows: 5, timing: NewsTiming::Lagged }
    }
}

/// Inputs to the news construction, all on the same quarterly index.
#[derive(Debug, Clone, Copy)]
pub struct NewsInputs<'a> {
    /// Prevalence series of the seeded topics.
    pub prev: &'a [(&'a str, &'a [f64])],
    /// All legislated tax changes (e.g. present-value and implementation
    /// dated).
    pub dt_all: &'a [(&'a str, &'a [f64])],
    /// Exogenous present-value changes; zero off-events.
    pub dt_exo: &'a [f64],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewsCoefficient {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct NewsSeries {
    pub h: usize,
    pub timing: NewsTiming,
    /// NaN where required lags are missing.
    pub values: Vec<f64>,
    /// Prevalence coefficients of the news regression, `β̂_{j,h}`.
    pub beta: Vec<NewsCoefficient>,
    /// Full news regression (prevalence and tax-change terms).
    pub regression: Regression,
    pub prev_perp: Vec<Vec<f64>>,
    pub news_perp: Vec<f64>,
    /// Quarters with a nonzero exogenous change.
    pub n_events: usize,
}

pub fn event_mask(dt_exo: &[f64]) -> Vec<bool> {
    dt_exo.iter().map(|&x| x.is_finite() && x != 0.0).collect()
}

pub fn build_news(inputs: &NewsInputs<'_>, cfg: &NewsConfig) -> Result<NewsSeries> {
    let n = inputs.dt_exo.len();
    if inputs.prev.is_empty() || inputs.dt_all.is_empty() {
        return Err(Error::InvalidInput("news construction needs prevalence and tax-change series".into()));
    }
    if inputs.prev.iter().chain(inputs.dt_all).any(|(_, s)| s.len() != n) {
        return Err(Error::InvalidInput("news inputs have different lengths".into()));
    }
    let events = event_mask(inputs.dt_exo);
    let n_events = events.iter().filter(|&&e| e).count();
    let mask = cfg.event_mask.then_some(events.as_slice());

    let prev_series: Vec<&[f64]> = inputs.prev.iter().map(|(_, s)| *s).collect();
    let prev_perp = project_out(&prev_series, inputs.dt_all, cfg.proj_lags, cfg.intercept, None, 1)?;
    let news_perp = project_out(&[inputs.dt_exo], inputs.dt_all, cfg.proj_lags, cfg.intercept, mask, cfg.min_extra_rows)?
        .pop()
        .unwrap();

    let h = cfg.h as isize;
    let target = shift(&news_perp, -h);
    let lead_mask: Option<Vec<bool>> =
        cfg.event_mask.then(|| (0..n).map(|t| t + cfg.h < n && events[t + cfg.h]).collect());

    let mut prev_block = Design::new();
    for ((name, _), perp) in inputs.prev.iter().zip(&prev_perp) {
        prev_block.lags(name, perp, 0..=cfg.p1);
    }
    let mut design = Design::new();
    if cfg.intercept {
        design.intercept(n);
    }
    design.extend(&prev_block);
    for (name, x) in inputs.dt_all {
        design.lags(name, x, 0..=cfg.p2);
    }
    let regression = regress(&target, &design, lead_mask.as_deref(), cfg.min_extra_rows, "news regression")?;

    let offset = usize::from(cfg.intercept);
    let beta: Vec<NewsCoefficient> = prev_block
        .names
        .iter()
        .enumerate()
        .map(|(i, name)| NewsCoefficient { name: name.clone(), value: regression.fit.beta[offset + i] })
        .collect();
    let coeffs: Vec<f64> = beta.iter().map(|c| c.value).collect();
    let forecast = prev_block.predict(&coeffs);
    let values = match cfg.timing {
        NewsTiming::Forecast => forecast,
        NewsTiming::Lagged => shift(&forecast, h),
    };
    Ok(NewsSeries { h: cfg.h, timing: cfg.timing, values, beta, regression, prev_perp, news_perp, n_events })
}
