use super::design::Design;
use super::frame::TsFrame;
use super::lp::{leads, local_projection, lp_controls, lp_iv, IrfResult, LpConfig};
use super::var::{choleski_factor, fit_var, var_choleski_irf};
use crate::error::{Error, Result};

/// Everything an impulse-response estimator may need, by column name.
#[derive(Debug, Clone, Copy)]
pub struct IrfRequest<'a> {
    pub frame: &'a TsFrame,
    pub response: &'a str,
    pub shock: &'a str,
    pub controls: &'a [String],
    /// Instrument columns, entered with lags `0..=instrument_lags`.
    pub instruments: &'a [String],
    pub instrument_lags: usize,
    /// Lead of the endogenous regressor in LP-IV.
    pub endog_lead: usize,
    pub var_lags: usize,
    pub lp: &'a LpConfig,
}

pub trait IrfEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, req: &IrfRequest<'_>) -> Result<IrfResult>;
}

fn named<'a>(frame: &'a TsFrame, names: &'a [String]) -> Result<Vec<(&'a str, &'a [f64])>> {
    names.iter().map(|n| Ok((n.as_str(), frame.column(n)?))).collect()
}

/// Local projection on the observed shock series.
pub struct LocalProjection;

impl IrfEstimator for LocalProjection {
    fn name(&self) -> &'static str {
        "lp"
    }

    fn estimate(&self, req: &IrfRequest<'_>) -> Result<IrfResult> {
        let y = req.frame.column(req.response)?;
        let shock = req.frame.column(req.shock)?;
        let controls = named(req.frame, req.controls)?;
        local_projection(&leads(y, req.lp.h_max), &[(req.shock, shock)], &lp_controls(y, &controls, req.lp), req.lp)
    }
}

/// LP-IV with the shock column as the (led) endogenous regressor.
pub struct LocalProjectionIv;

impl IrfEstimator for LocalProjectionIv {
    fn name(&self) -> &'static str {
        "lp_iv"
    }

    fn estimate(&self, req: &IrfRequest<'_>) -> Result<IrfResult> {
        let y = req.frame.column(req.response)?;
        let endog = req.frame.column(req.shock)?;
        let controls = named(req.frame, req.controls)?;
        let mut inst = Design::new();
        for (name, x) in named(req.frame, req.instruments)? {
            inst.lags(name, x, 0..=req.instrument_lags);
        }
        let out = lp_iv(&leads(y, req.lp.h_max), endog, req.endog_lead, &inst, &lp_controls(y, &controls, req.lp), req.lp)?;
        Ok(out.irf)
    }
}

/// Recursive VAR with the shock ordered first, then the response, then the
/// controls. Responses are scaled by the shock variable's own impact so
/// they are per unit of the shock series, as in the local projection.
pub struct VarCholeski;

impl IrfEstimator for VarCholeski {
    fn name(&self) -> &'static str {
        "var_choleski"
    }

    fn estimate(&self, req: &IrfRequest<'_>) -> Result<IrfResult> {
        let mut names = vec![req.shock.to_string(), req.response.to_string()];
        names.extend(req.controls.iter().filter(|c| *c != req.shock && *c != req.response).cloned());
        let series = named(req.frame, &names)?;
        let fit = fit_var(&series, req.var_lags, req.lp.deterministic)?;
        let own_impact = choleski_factor(&fit.sigma)?[(0, 0)];
        let paths = var_choleski_irf(&fit, 0, req.lp.h_max)?;
        Ok(IrfResult {
            beta: paths.iter().map(|r| r[1] / own_impact).collect(),
            se: None,
            bands: Vec::new(),
            n_obs: vec![fit.n_obs; paths.len()],
        })
    }
}

type Factory = fn() -> Box<dyn IrfEstimator>;

const REGISTRY: &[(&str, Factory)] = &[
    ("lp", || Box::new(LocalProjection)),
    ("lp_iv", || Box::new(LocalProjectionIv)),
    ("var_choleski", || Box::new(VarCholeski)),
];

pub fn irf_estimator(name: &str) -> Result<Box<dyn IrfEstimator>> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f())
        .ok_or_else(|| Error::UnknownStrategy { kind: "IRF estimator", name: name.to_string(), available: irf_estimator_names() })
}

pub fn irf_estimator_names() -> Vec<String> {
    REGISTRY.iter().map(|(n, _)| n.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::Deterministic;
    use crate::synthlab::simulate_var;
    use nalgebra::DMatrix;

    #[test]
    fn lp_and_var_agree_on_var_data() {
        let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.3, 0.6]);
        let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.4, 0.4, 1.0]);
        let sim = simulate_var(&[a], &sigma, 5000, 200, 21).unwrap();
        let mut frame = sim.frame();
        frame.columns[0].name = "news".into();
        frame.columns[1].name = "gdp".into();
        let lp_cfg = LpConfig { h_max: 6, y_lags: 2, control_lags: 2, deterministic: Deterministic { intercept: true, trend_order: 0 }, ..Default::default() };
        let controls = vec!["news".to_string()];
        let req = IrfRequest {
            frame: &frame,
            response: "gdp",
            shock: "news",
            controls: &controls,
            instruments: &[],
            instrument_lags: 0,
            endog_lead: 1,
            var_lags: 2,
            lp: &lp_cfg,
        };
        let lp = irf_estimator("lp").unwrap().estimate(&req).unwrap();
        let var = irf_estimator("var_choleski").unwrap().estimate(&req).unwrap();
        for h in 0..=4 {
            assert!((lp.beta[h] - var.beta[h]).abs() < 0.1, "h={h}: {} vs {}", lp.beta[h], var.beta[h]);
        }
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(irf_estimator("svar"), Err(Error::UnknownStrategy { .. })));
        assert_eq!(irf_estimator_names(), vec!["lp", "lp_iv", "var_choleski"]);
    }
}
