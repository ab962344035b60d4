use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::design::{regress, Design};
use crate::error::{Error, Result};

/// Exclusion test of a block of regressors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTest {
    pub f: f64,
    pub p_value: f64,
    pub df_num: usize,
    pub df_den: usize,
    /// `(RSS_r − RSS_u) / RSS_r`
    pub partial_r2: f64,
    /// The unrestricted model fits exactly; `f` is +∞.
    pub perfect_fit: bool,
    pub n_obs: usize,
}

/// Compares `y ~ controls + tested` with `y ~ controls` on the common
/// complete-case sample.
pub fn exclusion_f(y: &[f64], tested: &Design, controls: &Design) -> Result<FTest> {
    if tested.is_empty() {
        return Err(Error::InvalidInput("exclusion test needs at least one tested regressor".into()));
    }
    let mut full = controls.clone();
    full.extend(tested);
    let unrestricted = regress(y, &full, None, 1, "unrestricted regression")?;
    let rows = unrestricted.rows.clone();
    // restrict the short regression to exactly the same rows
    let mut mask = vec![false; y.len()];
    rows.iter().for_each(|&t| mask[t] = true);
    let restricted = if controls.is_empty() {
        None
    } else {
        Some(regress(y, controls, Some(&mask), 1, "restricted regression")?)
    };
    let rss_u = unrestricted.fit.rss();
    let rss_r = match &restricted {
        Some(r) => r.fit.rss(),
        None => rows.iter().map(|&t| y[t] * y[t]).sum(),
    };
    let q = tested.len();
    let dof = unrestricted.fit.dof;
    let scale = rows.iter().map(|&t| y[t] * y[t]).sum::<f64>().max(f64::MIN_POSITIVE);
    let partial_r2 = if rss_r > 0.0 { ((rss_r - rss_u) / rss_r).max(0.0) } else { 0.0 };
    if rss_u <= 1e-24 * scale {
        return Ok(FTest { f: f64::INFINITY, p_value: 0.0, df_num: q, df_den: dof, partial_r2, perfect_fit: true, n_obs: rows.len() });
    }
    let f = ((rss_r - rss_u).max(0.0) / q as f64) / (rss_u / dof as f64);
    let dist = FisherSnedecor::new(q as f64, dof as f64).map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(FTest { f, p_value: dist.sf(f), df_num: q, df_den: dof, partial_r2, perfect_fit: false, n_obs: rows.len() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictiveTable {
    /// One test per lead `j`, in the order requested.
    pub leads: Vec<usize>,
    pub tests: Vec<FTest>,
    /// Largest F over the leads and the lead attaining it.
    pub f_max: f64,
    pub j_max: usize,
}

/// For each lead `j`, regresses `dt_t` on an intercept, the `z` block at
/// `t − j` and lags `1..=control_lags` of `dt` and of every extra control,
/// and tests the exclusion of the `z` block.
pub fn predictive_f(
    dt: &[f64],
    z: &[(&str, &[f64])],
    controls: &[(&str, &[f64])],
    leads: &[usize],
    control_lags: usize,
) -> Result<PredictiveTable> {
    if z.is_empty() || leads.is_empty() {
        return Err(Error::InvalidInput("predictive_f needs a tested block and at least one lead".into()));
    }
    let n = dt.len();
    let mut base = Design::new();
    base.intercept(n).lags("dep", dt, 1..=control_lags);
    for (name, x) in controls {
        base.lags(name, x, 1..=control_lags);
    }
    let mut tests = Vec::with_capacity(leads.len());
    for &j in leads {
        let mut block = Design::new();
        for (name, x) in z {
            block.lags(name, x, [j]);
        }
        tests.push(exclusion_f(dt, &block, &base)?);
    }
    let (j_idx, f_max) = tests
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, t)| if t.f > best.1 { (i, t.f) } else { best });
    Ok(PredictiveTable { leads: leads.to_vec(), tests, f_max, j_max: leads[j_idx] })
}

/// Exclusion of lags `1..=p` of every cause series from an autoregression of
/// order `p` in `effect` (with intercept).
pub fn granger_f(cause: &[(&str, &[f64])], effect: &[f64], p: usize) -> Result<FTest> {
    if p == 0 {
        return Err(Error::InvalidInput("Granger test needs lag order ≥ 1".into()));
    }
    let mut base = Design::new();
    base.intercept(effect.len()).lags("effect", effect, 1..=p);
    let mut block = Design::new();
    for (name, x) in cause {
        block.lags(name, x, 1..=p);
    }
    exclusion_f(effect, &block, &base)
}
