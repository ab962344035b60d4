//! Least squares, exclusion tests, the noisy-news construction, local
//! projections (plain and instrumented), VAR impulse responses and the
//! moving-block bootstrap.
//!
//! Series are plain `f64` slices on a shared quarterly index with NaN as the
//! missing marker; every regression runs on the complete-case rows of its
//! own design.

mod bootstrap;
mod cov;
mod design;
mod detrend;
mod frame;
mod ftest;
mod irf;
mod lp;
mod news;
mod ols;
mod var;

pub use bootstrap::{mbb_pipeline_ci, quantile_sorted, BootstrapConfig};
pub use cov::{
    covariance_estimator, covariance_names, default_bandwidth, sandwich, std_errors, Classical,
    CovarianceEstimator, Hc0, NeweyWest,
};
pub use design::{regress, Design, Regression};
pub use detrend::{detrend, Detrended, Deterministic};
pub use frame::{format_value, shift, Column, TsFrame};
pub use ftest::{exclusion_f, granger_f, predictive_f, FTest, PredictiveTable};
pub use irf::{
    irf_estimator, irf_estimator_names, IrfEstimator, IrfRequest, LocalProjection, LocalProjectionIv,
    VarCholeski,
};
pub use lp::{
    leads, local_projection, local_projection_levels, lp_controls, lp_iv, sign_split, trough_normalization,
    two_sls, Band, FirstStage, IrfResult, LpConfig, LpIvResult, TwoSls, WEAK_INSTRUMENT_F,
};
pub use news::{build_news, event_mask, project_out, NewsCoefficient, NewsConfig, NewsInputs, NewsSeries, NewsTiming};
pub use ols::{ols, ols_named, OlsFit};
pub use var::{choleski_factor, companion, fit_var, ma_coefficients, var_choleski_irf, VarFit};
