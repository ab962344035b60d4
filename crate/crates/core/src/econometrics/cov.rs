use nalgebra::{DMatrix, DVector};

use super::ols::OlsFit;
use crate::error::{Error, Result};

/// Coefficient covariance estimator for a fitted regression.
pub trait CovarianceEstimator: Send + Sync {
    fn name(&self) -> &str;
    fn covariance(&self, fit: &OlsFit) -> DMatrix<f64>;
}

/// `σ̂² (X'X)⁻¹`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Classical;

/// White's heteroskedasticity-robust sandwich without small-sample scaling.
#[derive(Debug, Clone, Copy, Default)]
pub struct Hc0;

/// Newey–West sandwich with Bartlett weights. `bandwidth = None` selects
/// `⌊1.3 √T⌋`; a bandwidth of zero reproduces [`Hc0`].
#[derive(Debug, Clone, Copy, Default)]
pub struct NeweyWest {
    pub bandwidth: Option<usize>,
}

pub fn default_bandwidth(n: usize) -> usize {
    (1.3 * (n as f64).sqrt()).floor() as usize
}

impl CovarianceEstimator for Classical {
    fn name(&self) -> &str {
        "classical"
    }

    fn covariance(&self, fit: &OlsFit) -> DMatrix<f64> {
        &fit.xtx_inv * fit.sigma2()
    }
}

impl CovarianceEstimator for Hc0 {
    fn name(&self) -> &str {
        "hc0"
    }

    fn covariance(&self, fit: &OlsFit) -> DMatrix<f64> {
        sandwich(&fit.xtx_inv, &fit.x, &fit.residuals, 0)
    }
}

impl CovarianceEstimator for NeweyWest {
    fn name(&self) -> &str {
        "hac"
    }

    fn covariance(&self, fit: &OlsFit) -> DMatrix<f64> {
        let bw = self.bandwidth.unwrap_or_else(|| default_bandwidth(fit.n()));
        sandwich(&fit.xtx_inv, &fit.x, &fit.residuals, bw)
    }
}

/// `B S B` with `S = Σ_l w_l Σ_t u_t u_{t−l} (x_t x_{t−l}' + x_{t−l} x_t')`,
/// Bartlett weights `w_l = 1 − l/(L+1)` and the `l = 0` term counted once.
pub fn sandwich(bread: &DMatrix<f64>, x: &DMatrix<f64>, u: &DVector<f64>, bandwidth: usize) -> DMatrix<f64> {
    let (n, k) = x.shape();
    let scores = DMatrix::from_fn(n, k, |t, j| x[(t, j)] * u[t]);
    let mut meat = scores.transpose() * &scores;
    for lag in 1..=bandwidth.min(n.saturating_sub(1)) {
        let w = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
        let a = scores.rows(lag, n - lag);
        let b = scores.rows(0, n - lag);
        let gamma = a.transpose() * b;
        meat += (&gamma + gamma.transpose()) * w;
    }
    let cov = bread * meat * bread;
    // remove rounding asymmetry
    (&cov + cov.transpose()) * 0.5
}

type Factory = fn(Option<usize>) -> Box<dyn CovarianceEstimator>;

const REGISTRY: &[(&str, Factory)] = &[
    ("classical", |_| Box::new(Classical)),
    ("hc0", |_| Box::new(Hc0)),
    ("hac", |bandwidth| Box::new(NeweyWest { bandwidth })),
];

pub fn covariance_estimator(name: &str, bandwidth: Option<usize>) -> Result<Box<dyn CovarianceEstimator>> {
    REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, f)| f(bandwidth))
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "covariance estimator",
            name: name.to_string(),
            available: covariance_names(),
        })
}

pub fn covariance_names() -> Vec<String> {
    REGISTRY.iter().map(|(n, _)| n.to_string()).collect()
}

pub fn std_errors(cov: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(cov.nrows(), cov.diagonal().iter().map(|v| v.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::econometrics::ols::ols;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn fixture(n: usize, seed: u64) -> OlsFit {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || -> f64 { StandardNormal.sample(&mut rng) };
        let x = DMatrix::from_fn(n, 3, |_, j| if j == 0 { 1.0 } else { draw() });
        let y = DVector::from_fn(n, |t, _| 1.0 + 0.5 * x[(t, 1)] - x[(t, 2)] + draw());
        ols(&y, &x).unwrap()
    }

    #[test]
    fn zero_bandwidth_is_hc0() {
        let fit = fixture(60, 1);
        let a = NeweyWest { bandwidth: Some(0) }.covariance(&fit);
        let b = Hc0.covariance(&fit);
        assert_eq!(a, b);
    }

    #[test]
    fn hac_is_symmetric_psd() {
        let fit = fixture(200, 2);
        let c = NeweyWest::default().covariance(&fit);
        assert_eq!(&c, &c.transpose());
        assert!(c.clone().symmetric_eigen().eigenvalues.iter().all(|&l| l >= -1e-14));
    }

    #[test]
    fn hac_close_to_classical_under_iid_errors() {
        let fit = fixture(5000, 3);
        // a short window keeps the kernel estimate's own noise small
        let hac = NeweyWest { bandwidth: Some(8) }.covariance(&fit);
        let classical = Classical.covariance(&fit);
        for i in 0..3 {
            for j in 0..3 {
                // off-diagonal entries are near zero, so compare on the diagonal scale
                let scale = (classical[(i, i)] * classical[(j, j)]).sqrt();
                assert!(
                    (hac[(i, j)] - classical[(i, j)]).abs() <= 0.2 * scale,
                    "({i},{j}): {} vs {}",
                    hac[(i, j)],
                    classical[(i, j)]
                );
            }
        }
    }

    #[test]
    fn registry_lookup() {
        assert_eq!(covariance_estimator("hac", Some(3)).unwrap().name(), "hac");
        assert!(matches!(covariance_estimator("hc9", None), Err(Error::UnknownStrategy { .. })));
        assert_eq!(covariance_names(), vec!["classical", "hc0", "hac"]);
    }
}
