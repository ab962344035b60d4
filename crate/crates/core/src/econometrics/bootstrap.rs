use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::detrend::detrend;
use super::frame::TsFrame;
use super::lp::{Band, IrfResult};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub block_length: usize,
    pub seed: u64,
    pub levels: Vec<f64>,
    /// Polynomial trend removed from I(1) columns before differencing.
    pub detrend_order: usize,
    /// Largest tolerated share of failed replicates.
    pub max_failure_rate: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self { replicates: 1999, block_length: 12, seed: 1, levels: vec![0.68, 0.90], detrend_order: 1, max_failure_rate: 0.01 }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block_length == 0 {
            return Err(Error::InvalidInput("block_length must be at least 1".into()));
        }
        if self.replicates < 99 {
            return Err(Error::InvalidInput(format!("need at least 99 bootstrap replicates, got {}", self.replicates)));
        }
        if self.levels.iter().any(|&l| !(0.0 < l && l < 1.0)) {
            return Err(Error::InvalidInput("band levels must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

/// Type-7 quantile (linear interpolation between order statistics) of
/// sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let pos = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Stationary representation of a frame: I(0) columns as they are, I(1)
/// columns detrended and differenced.
struct Prepared {
    /// Rows of `frame` where every transformed column is observed.
    rows: Vec<usize>,
    values: Vec<Vec<f64>>,
    /// Detrended level just before the first usable row (I(1) columns).
    start_levels: Vec<f64>,
}

fn prepare(frame: &TsFrame, order: usize) -> Result<Prepared> {
    let n = frame.len();
    let mut values = Vec::with_capacity(frame.columns.len());
    let mut detrended = Vec::with_capacity(frame.columns.len());
    for c in &frame.columns {
        if c.integrated {
            let d = detrend(&c.values, order)?.residuals;
            values.push((0..n).map(|t| if t == 0 { f64::NAN } else { d[t] - d[t - 1] }).collect());
            detrended.push(d);
        } else {
            values.push(c.values.clone());
            detrended.push(Vec::new());
        }
    }
    let rows: Vec<usize> = (0..n).filter(|&t| values.iter().all(|v: &Vec<f64>| v[t].is_finite())).collect();
    if rows.is_empty() {
        return Err(Error::InvalidInput("no complete rows to resample".into()));
    }
    let start_levels = frame
        .columns
        .iter()
        .zip(&detrended)
        .map(|(c, d)| if c.integrated { d.get(rows[0].wrapping_sub(1)).copied().filter(|v| v.is_finite()).unwrap_or(0.0) } else { 0.0 })
        .collect();
    Ok(Prepared { rows, values, start_levels })
}

/// One moving-block resample of the prepared data, re-accumulated into levels.
fn replicate(frame: &TsFrame, prep: &Prepared, block: usize, rng: &mut ChaCha8Rng) -> TsFrame {
    let n = prep.rows.len();
    let block = block.min(n);
    let mut picks = Vec::with_capacity(n + block);
    while picks.len() < n {
        let start = rng.random_range(0..=n - block);
        picks.extend(start..start + block);
    }
    picks.truncate(n);
    let first = prep.rows[0];
    let mut out = TsFrame { index: frame.index[first..first + n].to_vec(), columns: Vec::with_capacity(frame.columns.len()) };
    for (j, c) in frame.columns.iter().enumerate() {
        let draws = picks.iter().map(|&i| prep.values[j][prep.rows[i]]);
        let values: Vec<f64> = if c.integrated {
            let mut level = prep.start_levels[j];
            draws.map(|d| {
                level += d;
                level
            })
            .collect()
        } else {
            draws.collect()
        };
        out.columns.push(super::frame::Column { name: c.name.clone(), values, integrated: c.integrated });
    }
    out
}

/// Moving-block bootstrap of an estimation pipeline.
///
/// The data are made stationary (see [`BootstrapConfig::detrend_order`]),
/// resampled jointly in blocks, re-accumulated, and handed to `pipeline`,
/// whose point estimates per horizon are collected. With `β̄*` the mean of
/// the replicate estimates and `q*_p` the quantiles of `β* − β̄*`, the band
/// at level `1 − a` is `[β̂ − q*_{1−a/2}, β̂ − q*_{a/2}]`. Replicate `b` uses
/// seed `seed + b`.
pub fn mbb_pipeline_ci<F>(frame: &TsFrame, pipeline: F, cfg: &BootstrapConfig) -> Result<IrfResult>
where
    F: Fn(&TsFrame) -> Result<IrfResult>,
{
    cfg.validate()?;
    let mut point = pipeline(frame)?;
    let prep = prepare(frame, cfg.detrend_order)?;
    let horizons = point.beta.len();
    let mut draws: Vec<Vec<f64>> = vec![Vec::with_capacity(cfg.replicates); horizons];
    let mut failed = 0;
    for b in 0..cfg.replicates {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(b as u64));
        let sample = replicate(frame, &prep, cfg.block_length, &mut rng);
        match pipeline(&sample) {
            Ok(r) if r.beta.len() == horizons && r.beta.iter().all(|x| x.is_finite()) => {
                for (d, x) in draws.iter_mut().zip(r.beta) {
                    d.push(x);
                }
            }
            Ok(_) => failed += 1,
            Err(e) => {
                warn!("bootstrap replicate {b} failed: {e}");
                failed += 1;
            }
        }
    }
    if failed as f64 > cfg.max_failure_rate * cfg.replicates as f64 {
        return Err(Error::BootstrapFailures { failed, total: cfg.replicates });
    }
    let mut bands: Vec<Band> = cfg
        .levels
        .iter()
        .map(|&level| Band { level, lower: Vec::with_capacity(horizons), upper: Vec::with_capacity(horizons) })
        .collect();
    for (h, d) in draws.iter_mut().enumerate() {
        let mean = d.iter().sum::<f64>() / d.len() as f64;
        let mut centered: Vec<f64> = d.iter().map(|x| x - mean).collect();
        centered.sort_by(f64::total_cmp);
        for band in &mut bands {
            let a = 1.0 - band.level;
            band.lower.push(point.beta[h] - quantile_sorted(&centered, 1.0 - a / 2.0));
            band.upper.push(point.beta[h] - quantile_sorted(&centered, a / 2.0));
        }
    }
    point.bands = bands;
    Ok(point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Quarter;
    use crate::econometrics::lp::{local_projection_levels, LpConfig};
    use crate::econometrics::Deterministic;
    use rand_distr::{Distribution, StandardNormal};

    fn frame(n: usize, seed: u64) -> TsFrame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut y = vec![0.0; n];
        for t in 0..n {
            let e: f64 = StandardNormal.sample(&mut rng);
            y[t] = if t > 0 { y[t - 1] } else { 0.0 } + 0.5 * s[t] + e;
        }
        let mut f = TsFrame::with_length(Quarter { year: 1950, q: 1 }, n);
        f.push("y", y, true).unwrap();
        f.push("s", s, false).unwrap();
        f
    }

    fn pipeline(f: &TsFrame) -> Result<IrfResult> {
        let cfg = LpConfig { h_max: 2, y_lags: 2, control_lags: 0, deterministic: Deterministic { intercept: true, trend_order: 1 }, ..Default::default() };
        local_projection_levels(f.column("y")?, f.column("s")?, &[], &cfg)
    }

    #[test]
    fn type7_quantiles() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&x, 0.0), 1.0);
        assert_eq!(quantile_sorted(&x, 1.0), 4.0);
        assert!((quantile_sorted(&x, 0.5) - 2.5).abs() < 1e-15);
        assert!((quantile_sorted(&x, 0.1) - 1.3).abs() < 1e-12);
    }

    #[test]
    fn whole_sample_block_gives_zero_width_bands() {
        let f = frame(120, 1);
        let cfg = BootstrapConfig { replicates: 99, block_length: 1000, ..Default::default() };
        let r = mbb_pipeline_ci(&f, pipeline, &cfg).unwrap();
        for band in &r.bands {
            for h in 0..=2 {
                assert!((band.lower[h] - r.beta[h]).abs() < 1e-12 && (band.upper[h] - r.beta[h]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_and_ordered() {
        let f = frame(150, 2);
        let cfg = BootstrapConfig { replicates: 99, block_length: 12, seed: 5, ..Default::default() };
        let a = mbb_pipeline_ci(&f, pipeline, &cfg).unwrap();
        let b = mbb_pipeline_ci(&f, pipeline, &cfg).unwrap();
        assert_eq!(a, b);
        for band in &a.bands {
            assert!(band.lower.iter().zip(&band.upper).all(|(l, u)| l <= u));
        }
        let wide = a.band(0.90).unwrap();
        let narrow = a.band(0.68).unwrap();
        assert!(wide.lower[0] <= narrow.lower[0] && wide.upper[0] >= narrow.upper[0]);
    }

    #[test]
    fn replicate_preserves_blocks_and_levels() {
        let f = frame(60, 3);
        let prep = prepare(&f, 1).unwrap();
        assert_eq!(prep.rows[0], 1);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = replicate(&f, &prep, 60, &mut rng);
        // a single block spanning everything reproduces the detrended levels
        let d = detrend(f.column("y").unwrap(), 1).unwrap().residuals;
        for t in 0..59 {
            assert!((r.columns[0].values[t] - d[t + 1]).abs() < 1e-10);
            assert_eq!(r.columns[1].values[t], f.columns[1].values[t + 1]);
        }
    }

    #[test]
    fn too_many_failures_is_an_error() {
        let f = frame(80, 4);
        let cfg = BootstrapConfig { replicates: 100, ..Default::default() };
        let flaky = |fr: &TsFrame| {
            if fr.len() == 80 {
                pipeline(fr)
            } else {
                Err(Error::Numerical("boom".into()))
            }
        };
        assert!(matches!(mbb_pipeline_ci(&f, flaky, &cfg), Err(Error::BootstrapFailures { failed: 100, total: 100 })));
        assert!(mbb_pipeline_ci(&f, pipeline, &BootstrapConfig { replicates: 10, ..Default::default() }).is_err());
    }
}
