use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use taxnews_core::econometrics::{fit_var, granger_f, Deterministic};
use taxnews_core::synthlab::simulate_var;

fn ar1(n: usize, phi: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for t in 0..n {
        let e: f64 = StandardNormal.sample(rng);
        x[t] = if t > 0 { phi * x[t - 1] } else { 0.0 } + e;
    }
    x
}

#[test]
fn granger_test_has_nominal_size() {
    let reps = 400;
    let mut rejected = 0;
    for r in 0..reps {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + r);
        let cause = ar1(400, 0.6, &mut rng);
        let effect = ar1(400, 0.4, &mut rng);
        let test = granger_f(&[("cause", &cause)], &effect, 4).unwrap();
        rejected += usize::from(test.p_value < 0.05);
    }
    // binomial sd at 5% over 400 draws is about 1.1 points
    let rate = rejected as f64 / reps as f64;
    assert!((0.02..=0.08).contains(&rate), "rejection rate {rate}");
}

#[test]
fn granger_test_has_power_against_a_lagged_cause() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cause = ar1(300, 0.5, &mut rng);
    let noise = ar1(300, 0.0, &mut rng);
    let effect: Vec<f64> = (0..300).map(|t| if t > 0 { 0.4 * cause[t - 1] } else { 0.0 } + noise[t]).collect();
    assert!(granger_f(&[("cause", &cause)], &effect, 2).unwrap().p_value < 1e-6);
}

#[test]
fn var_fit_recovers_coefficients_and_covariance() {
    let a = DMatrix::from_row_slice(2, 2, &[0.6, -0.2, 0.25, 0.3]);
    let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.5]);
    let sim = simulate_var(&[a.clone()], &sigma, 8000, 200, 77).unwrap();
    let fit = fit_var(&[("a", &sim.series[0]), ("b", &sim.series[1])], 1, Deterministic { intercept: true, trend_order: 0 }).unwrap();
    assert!(fit.is_stable());
    // coefficient sd is about 1/√T ≈ 0.011
    assert!((&fit.a[0] - &a).abs().max() < 0.05, "{}", fit.a[0]);
    assert!((&fit.sigma - &sigma).abs().max() < 0.06, "{}", fit.sigma);
}
