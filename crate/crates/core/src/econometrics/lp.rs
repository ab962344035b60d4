use log::warn;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use super::cov::{covariance_estimator, sandwich, std_errors};
use super::design::{regress, Design};
use super::detrend::Deterministic;
use super::frame::{format_value, shift};
use super::ftest::{exclusion_f, FTest};
use super::ols::ols_named;
use crate::error::{Error, Result};

/// Rule-of-thumb threshold below which instruments are considered weak.
pub const WEAK_INSTRUMENT_F: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub level: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Impulse response over horizons `0..=H`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrfResult {
    pub beta: Vec<f64>,
    /// Standard errors where the estimator provides them.
    pub se: Option<Vec<f64>>,
    pub bands: Vec<Band>,
    pub n_obs: Vec<usize>,
}

impl IrfResult {
    pub fn h_max(&self) -> usize {
        self.beta.len().saturating_sub(1)
    }

    pub fn band(&self, level: f64) -> Option<&Band> {
        self.bands.iter().find(|b| (b.level - level).abs() < 1e-9)
    }

    /// Symmetric normal-approximation bands from the standard errors.
    pub fn with_normal_bands(mut self, levels: &[f64]) -> Self {
        if let Some(se) = &self.se {
            let normal = Normal::new(0.0, 1.0).unwrap();
            self.bands = levels
                .iter()
                .map(|&level| {
                    let z = normal.inverse_cdf(0.5 + level / 2.0);
                    Band {
                        level,
                        lower: self.beta.iter().zip(se).map(|(b, s)| b - z * s).collect(),
                        upper: self.beta.iter().zip(se).map(|(b, s)| b + z * s).collect(),
                    }
                })
                .collect();
        }
        self
    }

    /// Multiplies point estimates, errors and bands by `factor`; bands are
    /// re-ordered if the factor is negative.
    pub fn scale(&mut self, factor: f64) {
        self.beta.iter_mut().for_each(|b| *b *= factor);
        if let Some(se) = &mut self.se {
            se.iter_mut().for_each(|s| *s *= factor.abs());
        }
        for band in &mut self.bands {
            for (lo, hi) in band.lower.iter_mut().zip(band.upper.iter_mut()) {
                let (a, b) = (*lo * factor, *hi * factor);
                (*lo, *hi) = if a <= b { (a, b) } else { (b, a) };
            }
        }
    }

    /// CSV with columns `horizon,beta,lo68,hi68,lo90,hi90,n_obs`; absent
    /// bands are left empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("horizon,beta,lo68,hi68,lo90,hi90,n_obs\n");
        for h in 0..self.beta.len() {
            let band = |level: f64| match self.band(level) {
                Some(b) => (format_value(b.lower[h]), format_value(b.upper[h])),
                None => (String::new(), String::new()),
            };
            let (l68, u68) = band(0.68);
            let (l90, u90) = band(0.90);
            out.push_str(&format!("{h},{},{l68},{u68},{l90},{u90},{}\n", format_value(self.beta[h]), self.n_obs[h]));
        }
        out
    }
}

/// Factor that moves the trough (minimum) of `reference` to −1.
pub fn trough_normalization(reference: &IrfResult) -> Result<f64> {
    let trough = reference.beta.iter().copied().fold(f64::INFINITY, f64::min);
    if !(trough < 0.0) {
        return Err(Error::InvalidInput("reference response has no negative trough to normalize".into()));
    }
    Ok(-1.0 / trough)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LpConfig {
    pub h_max: usize,
    /// Lags `1..=y_lags` of the response in every regression.
    pub y_lags: usize,
    /// Lags `1..=control_lags` of each extra control.
    pub control_lags: usize,
    pub deterministic: Deterministic,
    /// Covariance estimator name (see `covariance_names`).
    pub covariance: String,
    /// HAC bandwidth; `None` uses the default rule.
    pub bandwidth: Option<usize>,
}

impl Default for LpConfig {
    fn default() -> Self {
        Self {
            h_max: 20,
            y_lags: 12,
            control_lags: 12,
            deterministic: Deterministic::default(),
            covariance: "hac".into(),
            bandwidth: None,
        }
    }
}

/// Leads `y_{t+H}` for `H = 0..=h_max`, each aligned at `t`.
pub fn leads(y: &[f64], h_max: usize) -> Vec<Vec<f64>> {
    (0..=h_max).map(|h| shift(y, -(h as isize))).collect()
}

/// Controls shared by every horizon: deterministic terms, lags of `y` and
/// lags of the extra controls.
pub fn lp_controls(y: &[f64], controls: &[(&str, &[f64])], cfg: &LpConfig) -> Design {
    let n = y.len();
    let mut d = Design::new();
    cfg.deterministic.append(&mut d, n);
    d.lags("y", y, 1..=cfg.y_lags);
    for (name, x) in controls {
        d.lags(name, x, 1..=cfg.control_lags);
    }
    d
}

/// One regression per horizon of `responses[H]` on the shock regressors and
/// the controls; the response to the first shock column is reported.
pub fn local_projection(
    responses: &[Vec<f64>],
    shocks: &[(&str, &[f64])],
    controls: &Design,
    cfg: &LpConfig,
) -> Result<IrfResult> {
    if shocks.is_empty() {
        return Err(Error::InvalidInput("local projection needs a shock series".into()));
    }
    let cov = covariance_estimator(&cfg.covariance, cfg.bandwidth)?;
    let mut design = Design::new();
    for (name, s) in shocks {
        design.push(*name, s.to_vec());
    }
    design.extend(controls);
    let mut beta = Vec::with_capacity(responses.len());
    let mut se = Vec::with_capacity(responses.len());
    let mut n_obs = Vec::with_capacity(responses.len());
    for (h, y) in responses.iter().enumerate() {
        let r = regress(y, &design, None, 1, &format!("local projection at horizon {h}"))?;
        beta.push(r.fit.beta[0]);
        se.push(std_errors(&cov.covariance(&r.fit))[0]);
        n_obs.push(r.rows.len());
    }
    Ok(IrfResult { beta, se: Some(se), bands: Vec::new(), n_obs })
}

/// Convenience wrapper building leads and controls from a level series.
pub fn local_projection_levels(
    y: &[f64],
    shock: &[f64],
    controls: &[(&str, &[f64])],
    cfg: &LpConfig,
) -> Result<IrfResult> {
    local_projection(&leads(y, cfg.h_max), &[("shock", shock)], &lp_controls(y, controls, cfg), cfg)
}

/// Splits a shock into positive and negative parts, which sum back to it.
pub fn sign_split(shock: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let pos = shock.iter().map(|&x| if x.is_nan() { x } else { x.max(0.0) }).collect();
    let neg = shock.iter().map(|&x| if x.is_nan() { x } else { x.min(0.0) }).collect();
    (pos, neg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirstStage {
    pub test: FTest,
    pub weak: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpIvResult {
    pub irf: IrfResult,
    /// First-stage instrument exclusion test at each horizon's sample.
    pub first_stage: Vec<FirstStage>,
}

/// Two-stage least squares coefficients and structural residuals.
#[derive(Debug, Clone)]
pub struct TwoSls {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub x_hat: DMatrix<f64>,
    pub bread: DMatrix<f64>,
}

/// 2SLS of `y` on `[x, w]` with instruments `[z, w]`; the first column of
/// `x_all` is the endogenous regressor.
pub fn two_sls(
    y: &DVector<f64>,
    x_all: &DMatrix<f64>,
    z_all: &DMatrix<f64>,
    x_names: &[String],
    z_names: &[String],
) -> Result<TwoSls> {
    let first = ols_named(&x_all.column(0).into_owned(), z_all, z_names)?;
    let mut x_hat = x_all.clone();
    x_hat.set_column(0, &first.fitted);
    let second = ols_named(y, &x_hat, x_names)?;
    let residuals = y - x_all * &second.beta;
    Ok(TwoSls { beta: second.beta, residuals, x_hat, bread: second.xtx_inv })
}

/// LP-IV: responses at each horizon on `endog_{t+lead}` instrumented by the
/// instrument design, with common controls. HAC standard errors.
pub fn lp_iv(
    responses: &[Vec<f64>],
    endog: &[f64],
    endog_lead: usize,
    instruments: &Design,
    controls: &Design,
    cfg: &LpConfig,
) -> Result<LpIvResult> {
    if instruments.is_empty() {
        return Err(Error::InvalidInput("LP-IV needs at least one instrument".into()));
    }
    let x = shift(endog, -(endog_lead as isize));
    let mut all = Design::new();
    all.push("endog", x.clone());
    all.extend(controls);
    all.extend(instruments);
    let kx = 1 + controls.len();
    let bandwidth_for = |n: usize| cfg.bandwidth.unwrap_or_else(|| super::cov::default_bandwidth(n));

    let mut beta = Vec::new();
    let mut se = Vec::new();
    let mut n_obs = Vec::new();
    let mut first_stage = Vec::new();
    for (h, y) in responses.iter().enumerate() {
        let rows = all.complete_rows(y, None);
        let k_total = all.len();
        if rows.len() <= k_total {
            return Err(Error::InsufficientObservations {
                rows: rows.len(),
                regressors: k_total,
                context: format!("LP-IV at horizon {h}"),
            });
        }
        let m = all.matrix(&rows);
        let yv = DVector::from_iterator(rows.len(), rows.iter().map(|&t| y[t]));
        let x_all = m.columns(0, kx).into_owned();
        let mut z_all = DMatrix::zeros(rows.len(), all.len() - 1);
        z_all.columns_mut(0, instruments.len()).copy_from(&m.columns(kx, instruments.len()));
        z_all.columns_mut(instruments.len(), controls.len()).copy_from(&m.columns(1, controls.len()));
        let mut z_names = instruments.names.clone();
        z_names.extend(controls.names.iter().cloned());
        let fit = two_sls(&yv, &x_all, &z_all, &all.names[..kx], &z_names)?;
        let cov = sandwich(&fit.bread, &fit.x_hat, &fit.residuals, bandwidth_for(rows.len()));
        beta.push(fit.beta[0]);
        se.push(cov[(0, 0)].max(0.0).sqrt());
        n_obs.push(rows.len());

        let mut mask = vec![false; y.len()];
        rows.iter().for_each(|&t| mask[t] = true);
        let xs: Vec<f64> = (0..y.len()).map(|t| if mask[t] { x[t] } else { f64::NAN }).collect();
        let test = exclusion_f(&xs, instruments, controls)?;
        let weak = test.f < WEAK_INSTRUMENT_F;
        if weak {
            warn!("weak instruments at horizon {h}: first-stage F = {:.2} < {WEAK_INSTRUMENT_F}", test.f);
        }
        first_stage.push(FirstStage { test, weak });
    }
    Ok(LpIvResult { irf: IrfResult { beta, se: Some(se), bands: Vec::new(), n_obs }, first_stage })
}
